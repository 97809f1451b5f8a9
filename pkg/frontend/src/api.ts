// Typed client for the llteacher HTTP API (see ../../docs/api.md).

export type Role = 'instructor' | 'student'
export type SessionStatus = 'in_progress' | 'submitted' | 'graded'
export type SubmissionStatus = 'not_started' | SessionStatus
export type MessageAuthor = 'student' | 'tutor' | 'system_notice'
export type GuardAction = 'none' | 'regenerated' | 'redacted'

export interface LoginResponse {
  token: string
  user_id: string
  role: Role
  display_name: string
  expires_at: string
}

export interface HomeworkView {
  id: string
  title: string
  problem_statement: string
  mode: 'recall' | 'discovery'
  created_at: string
  due_at: string | null
  // present only in instructor responses
  solution?: string
  created_by?: string
}

export interface MessageView {
  seq: number
  author: MessageAuthor
  content: string
  created_at: string
  guard_action?: GuardAction | null
}

export interface SessionView {
  id: string
  homework_id: string
  student_id: string
  status: SessionStatus
  started_at: string
  submitted_at: string | null
  message_count: number
  grade?: GradeView
}

export interface GradeView {
  score: number
  feedback: string
  graded_at: string
}

export interface ChatTurn {
  student_message: MessageView
  tutor_message: MessageView
  guard_action: GuardAction
  session_status: SessionStatus
  /** true when the tutor was unavailable and the reply is a system notice */
  retryable: boolean
}

export interface TranscriptView {
  session_id: string
  homework_id: string
  homework_title: string
  student_id: string
  student_display_name: string
  status: SessionStatus
  started_at: string
  submitted_at: string | null
  grade: GradeView | null
  messages: MessageView[]
}

export interface SubmissionRowView {
  student_id: string
  student_display_name: string
  status: SubmissionStatus
  last_activity_at: string | null
  session_id: string | null
}

export interface TutorConfigView {
  model_id: string
  base_prompt: string
  guard_min_run: number
  guard_policy: 'regenerate_then_redact' | 'redact_only'
  max_turns: number | null
  temperature: number
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    public detail: string,
  ) {
    super(`${code}: ${detail}`)
    this.name = 'ApiError'
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = 'error'
  let detail = response.statusText || `HTTP ${response.status}`
  try {
    const body = await response.json()
    if (typeof body?.error === 'string') code = body.error
    if (typeof body?.detail === 'string') detail = body.detail
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, code, detail)
}

export class ApiClient {
  constructor(
    public readonly baseUrl: string,
    private token: string | null = null,
  ) {}

  setToken(token: string | null): void {
    this.token = token
  }

  private headers(json: boolean): Record<string, string> {
    const headers: Record<string, string> = {}
    if (json) headers['Content-Type'] = 'application/json'
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`
    return headers
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: this.headers(body !== undefined),
      body: body === undefined ? undefined : JSON.stringify(body),
    })
    if (!response.ok) throw await parseError(response)
    if (response.status === 204) return undefined as T
    return (await response.json()) as T
  }

  async login(name: string, credential: string): Promise<LoginResponse> {
    const result = await this.request<LoginResponse>('POST', '/api/login', {
      name,
      credential,
    })
    this.token = result.token
    return result
  }

  listHomework(): Promise<HomeworkView[]> {
    return this.request('GET', '/api/homework')
  }

  getHomework(id: string): Promise<HomeworkView> {
    return this.request('GET', `/api/homework/${id}`)
  }

  createHomework(body: {
    title: string
    problem_statement: string
    solution: string
    mode: 'recall' | 'discovery'
    due_at?: string
  }): Promise<HomeworkView> {
    return this.request('POST', '/api/homework', body)
  }

  updateHomework(
    id: string,
    body: Partial<{
      title: string
      problem_statement: string
      solution: string
      mode: 'recall' | 'discovery'
      due_at: string
    }>,
  ): Promise<HomeworkView> {
    return this.request('PUT', `/api/homework/${id}`, body)
  }

  deleteHomework(id: string): Promise<void> {
    return this.request('DELETE', `/api/homework/${id}`)
  }

  getConfig(): Promise<TutorConfigView> {
    return this.request('GET', '/api/config')
  }

  updateConfig(body: Partial<TutorConfigView>): Promise<TutorConfigView> {
    return this.request('PUT', '/api/config', body)
  }

  startSession(homeworkId: string): Promise<SessionView> {
    return this.request('POST', `/api/homework/${homeworkId}/session`)
  }

  /**
   * Post one chat turn. A 503 is not an exception: the student message was
   * recorded with a system notice, and the turn comes back `retryable`.
   */
  async sendMessage(sessionId: string, content: string): Promise<ChatTurn> {
    const response = await fetch(
      `${this.baseUrl}/api/session/${sessionId}/message`,
      {
        method: 'POST',
        headers: this.headers(true),
        body: JSON.stringify({ content }),
      },
    )
    if (response.ok || response.status === 503) {
      const body = await response.json()
      return { ...body, retryable: response.status === 503 } as ChatTurn
    }
    throw await parseError(response)
  }

  submitSession(sessionId: string): Promise<SessionView> {
    return this.request('POST', `/api/session/${sessionId}/submit`)
  }

  gradeSession(
    sessionId: string,
    score: number,
    feedback: string,
  ): Promise<SessionView> {
    return this.request('POST', `/api/session/${sessionId}/grade`, {
      score,
      feedback,
    })
  }

  getTranscript(sessionId: string): Promise<TranscriptView> {
    return this.request('GET', `/api/session/${sessionId}/transcript`)
  }

  listSubmissions(homeworkId: string): Promise<SubmissionRowView[]> {
    return this.request('GET', `/api/homework/${homeworkId}/submissions`)
  }
}
