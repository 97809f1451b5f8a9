import { ApiError } from '../api'
import { el, errorBox } from '../render'
import { homePage } from '../state'
import type { Ctx } from '../app'

export function LoginPage(ctx: Ctx): HTMLElement {
  const name = el('input', {
    name: 'name',
    'data-testid': 'login-name',
    autocomplete: 'username',
  })
  const credential = el('input', {
    name: 'credential',
    type: 'password',
    'data-testid': 'login-credential',
    autocomplete: 'current-password',
  })
  const errors = el('div')
  const form = el('form', { 'data-testid': 'login-form' }, [
    el('h1', {}, ['llteacher']),
    el('label', {}, ['Name ', name]),
    el('label', {}, ['Credential ', credential]),
    el('button', { type: 'submit', 'data-testid': 'login-submit' }, ['Sign in']),
    errors,
  ])
  form.addEventListener('submit', async (event) => {
    event.preventDefault()
    errors.replaceChildren()
    try {
      const user = await ctx.api.login(name.value, credential.value)
      ctx.store.set({ user })
      ctx.store.navigate(homePage(user.role))
    } catch (error) {
      const message =
        error instanceof ApiError && error.status === 401
          ? 'Unknown name or wrong credential.'
          : `Login failed: ${String(error)}`
      errors.append(errorBox(message))
    }
  })
  return el('main', { class: 'login-page' }, [form])
}
