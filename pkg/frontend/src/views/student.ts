// Student pages: the assignment list and the tutoring chat.

import { ApiError, type SessionStatus } from '../api'
import { el, errorBox, renderMessage, renderTranscriptMessages, statusBadge } from '../render'
import type { Ctx, Page } from '../app'

export async function AssignmentListPage(ctx: Ctx): Promise<Page> {
  const homework = await ctx.api.listHomework()
  ctx.store.set({ homework })
  const list = el('div', { class: 'cards', 'data-testid': 'assignment-list' })
  for (const hw of homework) {
    const open = el(
      'button',
      { 'data-testid': `open-${hw.id}`, 'data-title': hw.title },
      ['Open chat'],
    )
    open.addEventListener('click', async () => {
      const session = await ctx.api.startSession(hw.id)
      ctx.store.navigate({
        page: 'chat',
        sessionId: session.id,
        homeworkId: hw.id,
      })
    })
    list.append(
      el('section', { class: 'card', 'data-homework-id': hw.id }, [
        el('h2', {}, [hw.title]),
        el('p', { class: 'mode' }, [hw.mode]),
        el('p', {}, [hw.problem_statement]),
        open,
      ]),
    )
  }
  if (!homework.length) {
    list.append(el('p', {}, ['No assignments yet.']))
  }
  return { element: el('main', {}, [el('h1', {}, ['Your assignments']), list]) }
}

export async function ChatPage(
  ctx: Ctx,
  sessionId: string,
  homeworkId: string,
): Promise<Page> {
  const [homework, transcript] = await Promise.all([
    ctx.api.getHomework(homeworkId),
    ctx.api.getTranscript(sessionId),
  ])
  ctx.store.set({ transcript })

  const badge = el('span', { 'data-testid': 'session-status' }, [
    statusBadge(transcript.status),
  ])
  const messages = renderTranscriptMessages(transcript.messages)
  messages.setAttribute('data-testid', 'chat-messages')
  const errors = el('div')

  const composer = el('textarea', {
    'data-testid': 'composer',
    placeholder: 'Work through the problem with the tutor…',
  })
  const send = el('button', { 'data-testid': 'send' }, ['Send'])
  const submit = el('button', { 'data-testid': 'submit-session', class: 'submit' }, [
    'Submit for grading',
  ])

  function setLocked(status: SessionStatus) {
    badge.replaceChildren(statusBadge(status))
    const locked = status !== 'in_progress'
    composer.disabled = locked || ctx.store.get().pendingSend
    send.disabled = locked || ctx.store.get().pendingSend
    submit.disabled = locked
  }

  function setPending(pending: boolean) {
    ctx.store.set({ pendingSend: pending })
    composer.disabled = pending
    send.disabled = pending
  }

  async function deliver(content: string) {
    if (!content.trim()) return
    errors.replaceChildren()
    setPending(true)
    try {
      const turn = await ctx.api.sendMessage(sessionId, content)
      messages.append(renderMessage(turn.student_message))
      messages.append(renderMessage(turn.tutor_message))
      const current = ctx.store.get().transcript
      if (current && current.session_id === sessionId) {
        current.messages.push(turn.student_message, turn.tutor_message)
      }
      if (turn.retryable) {
        const retry = el('button', { 'data-testid': 'retry' }, ['Retry'])
        retry.addEventListener('click', () => {
          notice.remove()
          void deliver(content)
        })
        const notice = el('div', { class: 'retry-notice' }, [
          'The tutor was unavailable for that message. ',
          retry,
        ])
        messages.append(notice)
      } else {
        composer.value = ''
      }
      messages.scrollTop = messages.scrollHeight
    } catch (error) {
      errors.append(errorBox(describe(error)))
    } finally {
      setPending(false)
      setLocked(ctx.store.get().transcript?.status ?? transcript.status)
    }
  }

  send.addEventListener('click', () => void deliver(composer.value))
  submit.addEventListener('click', async () => {
    errors.replaceChildren()
    try {
      const session = await ctx.api.submitSession(sessionId)
      const current = ctx.store.get().transcript
      if (current) current.status = session.status
      setLocked(session.status)
    } catch (error) {
      errors.append(errorBox(describe(error)))
    }
  })

  setLocked(transcript.status)
  const element = el('main', { class: 'chat-page' }, [
    el('header', {}, [el('h1', {}, [homework.title]), badge]),
    el('details', { open: true }, [
      el('summary', {}, ['Problem statement']),
      el('p', { 'data-testid': 'problem-statement' }, [homework.problem_statement]),
    ]),
    messages,
    errors,
    el('footer', { class: 'composer' }, [composer, send, submit]),
  ])
  return { element }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    if (error.code === 'session_locked') return 'This session is already submitted.'
    if (error.code === 'turn_limit_reached') return 'The turn limit was reached.'
    return error.detail
  }
  return String(error)
}
