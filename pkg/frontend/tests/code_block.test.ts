// Secondary acceptance: fenced code in a student message renders with
// whitespace preserved and round-trips byte-identically through the API.

import { afterAll, beforeAll, describe, expect, it } from 'vitest'

import { ApiClient } from '../src/api'
import { createApp } from '../src/app'
import { splitContent } from '../src/render'
import {
  ACCOUNTS,
  mountPoint,
  setInput,
  startServer,
  submitForm,
  waitFor,
  type TestServer,
} from './helpers'

let server: TestServer

beforeAll(async () => {
  server = await startServer()
})

afterAll(async () => {
  await server.stop()
})

const CODE_BODY = 'x <- c(1,  2,\t3)\n  mean( x )   # indented, two spaces kept\n'
const MESSAGE = `Here is my attempt:\n\`\`\`r\n${CODE_BODY}\`\`\`\nDoes the indentation survive?`

describe('fenced code block fidelity', () => {
  it('renders monospaced with exact whitespace and round-trips via the API', async () => {
    const mount = mountPoint('code-app')
    const app = createApp(server.baseUrl, mount)
    await app.ready()
    const name = await waitFor(() =>
      mount.querySelector<HTMLInputElement>('[data-testid="login-name"]'),
    )
    setInput(name, ACCOUNTS.bob.name)
    setInput(
      mount.querySelector<HTMLInputElement>('[data-testid="login-credential"]')!,
      ACCOUNTS.bob.credential,
    )
    submitForm(mount.querySelector('[data-testid="login-form"]')!)

    const open = await waitFor(() =>
      [...mount.querySelectorAll<HTMLButtonElement>('[data-title]')].find(
        (button) => button.getAttribute('data-title') === 'Discovering Bootstrap',
      ),
    )
    open.click()
    const composer = await waitFor(() =>
      mount.querySelector<HTMLTextAreaElement>('[data-testid="composer"]'),
    )
    setInput(composer, MESSAGE)
    mount.querySelector<HTMLButtonElement>('[data-testid="send"]')!.click()
    await waitFor(
      () =>
        mount.querySelectorAll('[data-testid="chat-messages"] .message')
          .length >= 2,
    )

    // the rendered code block holds the exact bytes between the fences
    const student = mount.querySelector(
      '[data-testid="chat-messages"] .message.author-student',
    )!
    const pre = student.querySelector('pre code')!
    expect(pre.textContent).toBe(CODE_BODY)
    expect(pre.getAttribute('data-language')).toBe('r')

    // and the API transcript stored the full message byte-identically
    const api = new ApiClient(server.baseUrl)
    await api.login(ACCOUNTS.bob.name, ACCOUNTS.bob.credential)
    const sessionId = app.ctx.store.get().transcript!.session_id
    const transcript = await api.getTranscript(sessionId)
    expect(transcript.messages[0].content).toBe(MESSAGE)
  })

  it('splitContent keeps prose and code bytes intact', () => {
    const segments = splitContent(MESSAGE)
    expect(segments.map((s) => s.kind)).toEqual(['prose', 'code', 'prose'])
    expect(segments[1].text).toBe(CODE_BODY)
    expect(segments[1].language).toBe('r')
    expect(segments[0].text + '```r\n' + segments[1].text + '```' + segments[2].text).toBe(
      MESSAGE,
    )
  })

  it('unterminated fences fall back to prose', () => {
    const segments = splitContent('start ```r\nno closing fence')
    expect(segments).toEqual([
      { kind: 'prose', text: 'start ```r\nno closing fence', language: '' },
    ])
  })
})
