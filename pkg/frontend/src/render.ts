// DOM construction helpers. Text always goes through textContent, so
// message contents and code render byte-exact and cannot inject markup.

import type { MessageView, SubmissionStatus } from './api'

type Attrs = Record<string, string | boolean | EventListener>

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === 'function') {
      node.addEventListener(key, value)
    } else if (typeof value === 'boolean') {
      if (value) node.setAttribute(key, '')
      else node.removeAttribute(key)
      if (key === 'disabled') (node as unknown as { disabled: boolean }).disabled = value
    } else {
      node.setAttribute(key, value)
    }
  }
  for (const child of children) {
    node.append(child instanceof Node ? child : document.createTextNode(child))
  }
  return node
}

export interface ContentSegment {
  kind: 'prose' | 'code'
  text: string
  language: string
}

const FENCED = /```([^\n`]*)\n([\s\S]*?)```/g

/** Split a message into prose and fenced-code segments, bytes preserved. */
export function splitContent(content: string): ContentSegment[] {
  const segments: ContentSegment[] = []
  let cursor = 0
  for (const match of content.matchAll(FENCED)) {
    const at = match.index ?? 0
    if (at > cursor) {
      segments.push({ kind: 'prose', text: content.slice(cursor, at), language: '' })
    }
    segments.push({ kind: 'code', text: match[2], language: match[1].trim() })
    cursor = at + match[0].length
  }
  if (cursor < content.length) {
    segments.push({ kind: 'prose', text: content.slice(cursor), language: '' })
  }
  return segments
}

/** Prose with `inline code` spans rendered monospaced. */
function proseNode(text: string): HTMLElement {
  const span = el('span', { class: 'prose' })
  const parts = text.split(/(`[^`\n]+`)/)
  for (const part of parts) {
    if (part.startsWith('`') && part.endsWith('`') && part.length > 2) {
      span.append(el('code', { class: 'inline-code' }, [part.slice(1, -1)]))
    } else if (part) {
      span.append(document.createTextNode(part))
    }
  }
  return span
}

export function renderMessageBody(content: string): HTMLElement {
  const body = el('div', { class: 'message-body' })
  for (const segment of splitContent(content)) {
    if (segment.kind === 'code') {
      const code = el('code', { class: 'code-block' }, [segment.text])
      if (segment.language) code.setAttribute('data-language', segment.language)
      body.append(el('pre', {}, [code]))
    } else {
      body.append(proseNode(segment.text))
    }
  }
  return body
}

const AUTHOR_LABEL: Record<MessageView['author'], string> = {
  student: 'You',
  tutor: 'Tutor',
  system_notice: 'Notice',
}

export function renderMessage(
  message: MessageView,
  options: { showGuard?: boolean; studentName?: string } = {},
): HTMLElement {
  const row = el('article', {
    class: `message author-${message.author}`,
    'data-seq': String(message.seq),
    'data-author': message.author,
  })
  const who =
    message.author === 'student' && options.studentName
      ? options.studentName
      : AUTHOR_LABEL[message.author]
  const head = el('header', {}, [
    el('span', { class: 'author' }, [who]),
    el('time', {}, [new Date(message.created_at).toLocaleString()]),
  ])
  if (options.showGuard && message.guard_action && message.guard_action !== 'none') {
    head.append(
      el('span', { class: `guard-badge guard-${message.guard_action}` }, [
        message.guard_action,
      ]),
    )
  }
  row.append(head, renderMessageBody(message.content))
  return row
}

export function renderTranscriptMessages(
  messages: MessageView[],
  options: { showGuard?: boolean; studentName?: string } = {},
): HTMLElement {
  const list = el('div', { class: 'messages' })
  for (const message of [...messages].sort((a, b) => a.seq - b.seq)) {
    list.append(renderMessage(message, options))
  }
  return list
}

export function statusBadge(status: SubmissionStatus | string): HTMLElement {
  return el('span', { class: `badge status-${status}`, 'data-status': status }, [
    status.replace('_', ' '),
  ])
}

export function errorBox(message: string): HTMLElement {
  return el('p', { class: 'error', role: 'alert' }, [message])
}
