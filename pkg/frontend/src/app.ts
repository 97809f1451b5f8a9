// Router: renders the page for the current route into the mount point.

import { ApiClient } from './api'
import { el } from './render'
import { Store, type Route } from './state'
import { LoginPage } from './views/login'
import {
  ConfigPage,
  HomeworkEditorPage,
  HomeworkListPage,
  SubmissionsPage,
  TranscriptPage,
} from './views/instructor'
import { AssignmentListPage, ChatPage } from './views/student'

export interface Ctx {
  api: ApiClient
  store: Store
}

export interface Page {
  element: HTMLElement
  dispose?: () => void
}

export interface App {
  ctx: Ctx
  /** resolves when the current route has finished rendering */
  ready: () => Promise<void>
}

async function buildPage(ctx: Ctx, route: Route): Promise<Page> {
  switch (route.page) {
    case 'login':
      return { element: LoginPage(ctx) }
    case 'assignments':
      return AssignmentListPage(ctx)
    case 'chat':
      return ChatPage(ctx, route.sessionId, route.homeworkId)
    case 'homework-list':
      return HomeworkListPage(ctx)
    case 'homework-edit':
      return HomeworkEditorPage(ctx, route.homeworkId)
    case 'config':
      return ConfigPage(ctx)
    case 'submissions':
      return SubmissionsPage(ctx, route.homeworkId)
    case 'transcript':
      return TranscriptPage(ctx, route.sessionId)
  }
}

function navBar(ctx: Ctx): HTMLElement {
  const state = ctx.store.get()
  const nav = el('nav', { 'data-testid': 'nav' })
  if (!state.user) return nav
  const link = (label: string, route: Route, testid: string) => {
    const button = el('button', { class: 'nav-link', 'data-testid': testid }, [label])
    button.addEventListener('click', () => ctx.store.navigate(route))
    return button
  }
  if (state.user.role === 'instructor') {
    nav.append(
      link('Assignments', { page: 'homework-list' }, 'nav-homework'),
      link('Config', { page: 'config' }, 'nav-config'),
    )
  } else {
    nav.append(link('Assignments', { page: 'assignments' }, 'nav-assignments'))
  }
  const who = el('span', { class: 'whoami', 'data-testid': 'whoami' }, [
    `${state.user.display_name} (${state.user.role})`,
  ])
  const logout = el('button', { 'data-testid': 'logout' }, ['Log out'])
  logout.addEventListener('click', () => {
    ctx.api.setToken(null)
    ctx.store.set({ user: null, transcript: null, homework: [] })
    ctx.store.navigate({ page: 'login' })
  })
  nav.append(who, logout)
  return nav
}

export function createApp(baseUrl: string, mount: HTMLElement): App {
  const ctx: Ctx = { api: new ApiClient(baseUrl), store: new Store() }
  let rendered: { route: Route; user: unknown } | null = null
  let disposePrevious: (() => void) | undefined
  let inflight: Promise<void> = Promise.resolve()
  let generation = 0

  async function render(): Promise<void> {
    const state = ctx.store.get()
    const ticket = ++generation
    try {
      const page = await buildPage(ctx, state.route)
      if (ticket !== generation) {
        page.dispose?.()
        return
      }
      disposePrevious?.()
      disposePrevious = page.dispose
      mount.replaceChildren(navBar(ctx), page.element)
    } catch (error) {
      if (ticket !== generation) return
      disposePrevious?.()
      disposePrevious = undefined
      mount.replaceChildren(
        navBar(ctx),
        el('main', {}, [el('p', { class: 'error' }, [`Failed to load: ${String(error)}`])]),
      )
    }
  }

  ctx.store.subscribe((state) => {
    const needsRender =
      rendered === null ||
      rendered.route !== state.route ||
      rendered.user !== state.user
    if (needsRender) {
      rendered = { route: state.route, user: state.user }
      inflight = render()
    }
  })
  rendered = { route: ctx.store.get().route, user: ctx.store.get().user }
  inflight = render()

  return { ctx, ready: () => inflight }
}
