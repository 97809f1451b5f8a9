// Boots the real Python service (mock provider, seeded demo db) for tests.

import { spawn, spawnSync, type ChildProcess } from 'node:child_process'
import { mkdtempSync, writeFileSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'

export const ACCOUNTS = {
  instructor: { name: 'instructor', credential: 'teach-me-2026' },
  alice: { name: 'alice', credential: 'alice-pass' },
  bob: { name: 'bob', credential: 'bob-pass' },
}

export interface TestServer {
  baseUrl: string
  stop: () => Promise<void>
}

export async function startServer(): Promise<TestServer> {
  const dir = mkdtempSync(join(tmpdir(), 'llteacher-ui-'))
  const db = join(dir, 'test.db')
  const config = join(dir, 'provider.json')
  writeFileSync(config, JSON.stringify({ provider: 'mock' }))

  const seeded = spawnSync('python3', ['-m', 'llteacher.cli', '--db', db, 'seed-demo'])
  if (seeded.status !== 0) {
    throw new Error(`seed-demo failed: ${seeded.stderr?.toString()}`)
  }

  const port = 8100 + Math.floor(Math.random() * 2000)
  const baseUrl = `http://127.0.0.1:${port}`
  const proc: ChildProcess = spawn(
    'python3',
    [
      '-m',
      'llteacher.cli',
      '--db',
      db,
      'serve',
      '--listen',
      `127.0.0.1:${port}`,
      '--config',
      config,
    ],
    { stdio: ['ignore', 'pipe', 'pipe'] },
  )
  let stderr = ''
  proc.stderr?.on('data', (chunk) => {
    stderr += String(chunk)
  })

  const deadline = Date.now() + 30000
  for (;;) {
    try {
      const probe = await fetch(`${baseUrl}/api/login`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ name: 'nobody', credential: 'nothing' }),
      })
      if (probe.status === 401) break
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      proc.kill()
      throw new Error(`service did not come up on ${baseUrl}\n${stderr}`)
    }
    await sleep(100)
  }

  return {
    baseUrl,
    stop: () =>
      new Promise<void>((resolve) => {
        proc.once('exit', () => resolve())
        proc.kill('SIGTERM')
        setTimeout(() => {
          proc.kill('SIGKILL')
          resolve()
        }, 3000).unref()
      }),
  }
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms))
}

/** Poll until fn() returns a truthy value (or time runs out). */
export async function waitFor<T>(
  fn: () => T | null | undefined | false,
  timeoutMs = 15000,
  intervalMs = 25,
): Promise<T> {
  const deadline = Date.now() + timeoutMs
  for (;;) {
    const value = fn()
    if (value) return value
    if (Date.now() > deadline) {
      throw new Error('waitFor: condition not met in time')
    }
    await sleep(intervalMs)
  }
}

export function mountPoint(id: string): HTMLElement {
  const node = document.createElement('div')
  node.id = id
  document.body.append(node)
  return node
}

export function setInput(
  element: HTMLInputElement | HTMLTextAreaElement,
  value: string,
): void {
  element.value = value
  element.dispatchEvent(new Event('input', { bubbles: true }))
}

export function submitForm(form: HTMLElement): void {
  form.dispatchEvent(new Event('submit', { bubbles: true, cancelable: true }))
}
