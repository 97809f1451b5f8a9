// Client view state and role-based route rules.

import type { HomeworkView, LoginResponse, Role, TranscriptView } from './api'

export type Route =
  | { page: 'login' }
  | { page: 'assignments' }
  | { page: 'chat'; sessionId: string; homeworkId: string }
  | { page: 'homework-list' }
  | { page: 'homework-edit'; homeworkId: string | null }
  | { page: 'config' }
  | { page: 'submissions'; homeworkId: string }
  | { page: 'transcript'; sessionId: string }

const STUDENT_PAGES: ReadonlySet<Route['page']> = new Set([
  'login',
  'assignments',
  'chat',
])

const INSTRUCTOR_PAGES: ReadonlySet<Route['page']> = new Set([
  'login',
  'homework-list',
  'homework-edit',
  'config',
  'submissions',
  'transcript',
])

export function routeAllowed(role: Role | null, route: Route): boolean {
  if (route.page === 'login') return true
  if (role === 'student') return STUDENT_PAGES.has(route.page)
  if (role === 'instructor') return INSTRUCTOR_PAGES.has(route.page)
  return false
}

export function homePage(role: Role): Route {
  return role === 'student' ? { page: 'assignments' } : { page: 'homework-list' }
}

export interface ViewState {
  user: LoginResponse | null
  route: Route
  homework: HomeworkView[]
  transcript: TranscriptView | null
  /** a chat turn is in flight; the composer stays disabled until it lands */
  pendingSend: boolean
}

export type Listener = (state: ViewState) => void

export class Store {
  private state: ViewState = {
    user: null,
    route: { page: 'login' },
    homework: [],
    transcript: null,
    pendingSend: false,
  }
  private listeners: Listener[] = []

  get(): ViewState {
    return this.state
  }

  set(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch }
    for (const listener of this.listeners) listener(this.state)
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener)
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener)
    }
  }

  /** Navigate, falling back to the role's home page on a disallowed route. */
  navigate(route: Route): void {
    const role = this.state.user?.role ?? null
    if (!routeAllowed(role, route)) {
      route = role ? homePage(role) : { page: 'login' }
    }
    this.set({ route })
  }
}
