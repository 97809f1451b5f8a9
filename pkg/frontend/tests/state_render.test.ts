import { describe, expect, it } from 'vitest'

import type { MessageView } from '../src/api'
import { renderMessage, renderTranscriptMessages, splitContent } from '../src/render'
import { Store, homePage, routeAllowed } from '../src/state'

function message(seq: number, author: MessageView['author'], content: string,
                 guard: MessageView['guard_action'] = null): MessageView {
  return {
    seq,
    author,
    content,
    created_at: '2026-03-02T09:00:00+00:00',
    guard_action: guard,
  }
}

describe('route permissions', () => {
  it('students only reach student pages', () => {
    expect(routeAllowed('student', { page: 'assignments' })).toBe(true)
    expect(
      routeAllowed('student', { page: 'chat', sessionId: 's', homeworkId: 'h' }),
    ).toBe(true)
    expect(routeAllowed('student', { page: 'config' })).toBe(false)
    expect(routeAllowed('student', { page: 'homework-list' })).toBe(false)
    expect(routeAllowed('student', { page: 'submissions', homeworkId: 'h' })).toBe(
      false,
    )
    expect(routeAllowed('student', { page: 'transcript', sessionId: 's' })).toBe(
      false,
    )
  })

  it('instructors only reach instructor pages', () => {
    expect(routeAllowed('instructor', { page: 'config' })).toBe(true)
    expect(routeAllowed('instructor', { page: 'homework-list' })).toBe(true)
    expect(routeAllowed('instructor', { page: 'assignments' })).toBe(false)
    expect(
      routeAllowed('instructor', { page: 'chat', sessionId: 's', homeworkId: 'h' }),
    ).toBe(false)
  })

  it('anonymous users reach only the login page', () => {
    expect(routeAllowed(null, { page: 'login' })).toBe(true)
    expect(routeAllowed(null, { page: 'assignments' })).toBe(false)
  })

  it('navigate falls back to the role home page on a denied route', () => {
    const store = new Store()
    store.set({
      user: {
        token: 't',
        user_id: 'u',
        role: 'student',
        display_name: 'alice',
        expires_at: '',
      },
    })
    store.navigate({ page: 'config' })
    expect(store.get().route).toEqual(homePage('student'))
  })
})

describe('transcript rendering', () => {
  it('orders messages by seq regardless of input order', () => {
    const shuffled = [
      message(3, 'student', 'third'),
      message(1, 'student', 'first'),
      message(4, 'tutor', 'fourth'),
      message(2, 'tutor', 'second'),
    ]
    const list = renderTranscriptMessages(shuffled)
    const seqs = [...list.querySelectorAll('.message')].map((node) =>
      Number(node.getAttribute('data-seq')),
    )
    expect(seqs).toEqual([1, 2, 3, 4])
  })

  it('marks system notices distinctly', () => {
    const node = renderMessage(message(2, 'system_notice', 'tutor unavailable'))
    expect(node.classList.contains('author-system_notice')).toBe(true)
  })

  it('shows guard badges only when asked (instructor view)', () => {
    const redacted = message(2, 'tutor', 'guarded reply', 'redacted')
    expect(
      renderMessage(redacted, { showGuard: true }).querySelector('.guard-badge'),
    ).toBeTruthy()
    expect(
      renderMessage(redacted, { showGuard: false }).querySelector('.guard-badge'),
    ).toBeNull()
    const clean = message(2, 'tutor', 'ok', 'none')
    expect(
      renderMessage(clean, { showGuard: true }).querySelector('.guard-badge'),
    ).toBeNull()
  })

  it('message text is rendered as text, never as markup', () => {
    const sneaky = message(1, 'student', '<img src=x onerror=alert(1)>')
    const node = renderMessage(sneaky)
    expect(node.querySelector('img')).toBeNull()
    expect(node.querySelector('.message-body')!.textContent).toBe(
      '<img src=x onerror=alert(1)>',
    )
  })
})

describe('content segmentation', () => {
  it('prose only', () => {
    expect(splitContent('just words')).toEqual([
      { kind: 'prose', text: 'just words', language: '' },
    ])
  })

  it('multiple code blocks', () => {
    const content = 'a\n```r\nx <- 1\n```\nmiddle\n```\ny = 2\n```\nend'
    const kinds = splitContent(content).map((s) => s.kind)
    expect(kinds).toEqual(['prose', 'code', 'prose', 'code', 'prose'])
  })

  it('inline code stays inside prose segments', () => {
    const segments = splitContent('use `mean(x)` here')
    expect(segments).toHaveLength(1)
    expect(segments[0].kind).toBe('prose')
  })
})
