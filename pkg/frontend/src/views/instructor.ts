// Instructor pages: assignment management, tutor config, submissions
// overview (polled), and the transcript viewer with the grading form.

import { ApiError, type HomeworkView } from '../api'
import { el, errorBox, renderTranscriptMessages, statusBadge } from '../render'
import type { Ctx, Page } from '../app'

const SUBMISSIONS_POLL_MS = 5000

export async function HomeworkListPage(ctx: Ctx): Promise<Page> {
  const homework = await ctx.api.listHomework()
  ctx.store.set({ homework })
  const rows = el('tbody')
  for (const hw of homework) {
    rows.append(homeworkRow(ctx, hw))
  }
  const create = el('button', { 'data-testid': 'new-homework' }, ['New assignment'])
  create.addEventListener('click', () =>
    ctx.store.navigate({ page: 'homework-edit', homeworkId: null }),
  )
  const table = el('table', { 'data-testid': 'homework-table' }, [
    el('thead', {}, [
      el('tr', {}, [
        el('th', {}, ['Title']),
        el('th', {}, ['Mode']),
        el('th', {}, ['Created']),
        el('th', {}, ['Actions']),
      ]),
    ]),
    rows,
  ])
  return {
    element: el('main', {}, [
      el('h1', {}, ['Assignments']),
      create,
      homework.length ? table : el('p', {}, ['No assignments yet.']),
    ]),
  }
}

function homeworkRow(ctx: Ctx, hw: HomeworkView): HTMLElement {
  const edit = el('button', { 'data-testid': `edit-${hw.id}` }, ['Edit'])
  edit.addEventListener('click', () =>
    ctx.store.navigate({ page: 'homework-edit', homeworkId: hw.id }),
  )
  const submissions = el(
    'button',
    { 'data-testid': `submissions-${hw.id}` },
    ['Submissions'],
  )
  submissions.addEventListener('click', () =>
    ctx.store.navigate({ page: 'submissions', homeworkId: hw.id }),
  )
  const remove = el('button', { 'data-testid': `delete-${hw.id}` }, ['Delete'])
  const cell = el('td', {}, [edit, submissions, remove])
  const row = el('tr', { 'data-homework-id': hw.id }, [
    el('td', {}, [hw.title]),
    el('td', {}, [hw.mode]),
    el('td', {}, [new Date(hw.created_at).toLocaleDateString()]),
    cell,
  ])
  remove.addEventListener('click', async () => {
    try {
      await ctx.api.deleteHomework(hw.id)
      row.remove()
    } catch (error) {
      cell.append(
        errorBox(
          error instanceof ApiError && error.code === 'conflicting_reference'
            ? 'Cannot delete: students already have sessions.'
            : String(error),
        ),
      )
    }
  })
  return row
}

export async function HomeworkEditorPage(
  ctx: Ctx,
  homeworkId: string | null,
): Promise<Page> {
  const existing = homeworkId ? await ctx.api.getHomework(homeworkId) : null
  const title = el('input', { 'data-testid': 'hw-title' })
  title.value = existing?.title ?? ''
  const mode = el('select', { 'data-testid': 'hw-mode' }, [
    el('option', { value: 'recall' }, ['recall']),
    el('option', { value: 'discovery' }, ['discovery']),
  ])
  mode.value = existing?.mode ?? 'recall'
  const statement = el('textarea', { 'data-testid': 'hw-statement' })
  statement.value = existing?.problem_statement ?? ''
  const solution = el('textarea', { 'data-testid': 'hw-solution' })
  solution.value = existing?.solution ?? ''
  const errors = el('div')
  const form = el('form', { 'data-testid': 'homework-editor' }, [
    el('h1', {}, [existing ? `Edit: ${existing.title}` : 'New assignment']),
    el('label', {}, ['Title ', title]),
    el('label', {}, ['Mode ', mode]),
    el('label', {}, ['Problem statement (students see this) ', statement]),
    el('label', {}, ['Solution / guidance script (instructors only) ', solution]),
    el('button', { type: 'submit', 'data-testid': 'hw-save' }, ['Save']),
    errors,
  ])
  form.addEventListener('submit', async (event) => {
    event.preventDefault()
    errors.replaceChildren()
    const body = {
      title: title.value,
      problem_statement: statement.value,
      solution: solution.value,
      mode: mode.value as 'recall' | 'discovery',
    }
    try {
      if (existing) await ctx.api.updateHomework(existing.id, body)
      else await ctx.api.createHomework(body)
      ctx.store.navigate({ page: 'homework-list' })
    } catch (error) {
      errors.append(
        errorBox(error instanceof ApiError ? error.detail : String(error)),
      )
    }
  })
  return { element: el('main', {}, [form]) }
}

export async function ConfigPage(ctx: Ctx): Promise<Page> {
  const config = await ctx.api.getConfig()
  const model = el('input', { 'data-testid': 'cfg-model' })
  model.value = config.model_id
  const basePrompt = el('textarea', { 'data-testid': 'cfg-base-prompt' })
  basePrompt.value = config.base_prompt
  const minRun = el('input', { type: 'number', 'data-testid': 'cfg-guard-min-run' })
  minRun.value = String(config.guard_min_run)
  const policy = el('select', { 'data-testid': 'cfg-guard-policy' }, [
    el('option', { value: 'regenerate_then_redact' }, ['regenerate, then redact']),
    el('option', { value: 'redact_only' }, ['redact immediately']),
  ])
  policy.value = config.guard_policy
  const maxTurns = el('input', {
    type: 'number',
    'data-testid': 'cfg-max-turns',
    placeholder: 'unlimited',
  })
  maxTurns.value = config.max_turns === null ? '' : String(config.max_turns)
  const temperature = el('input', { 'data-testid': 'cfg-temperature' })
  temperature.value = String(config.temperature)
  const errors = el('div', { 'data-testid': 'cfg-errors' })
  const saved = el('span', { class: 'saved-note' })

  const form = el('form', { 'data-testid': 'config-form' }, [
    el('h1', {}, ['Tutor configuration']),
    el('label', {}, ['Model ', model]),
    el('label', {}, ['Base prompt ', basePrompt]),
    el('label', {}, ['Leak guard: minimum token run ', minRun]),
    el('label', {}, ['Leak guard: policy ', policy]),
    el('label', {}, ['Turn limit per session ', maxTurns]),
    el('label', {}, ['Temperature ', temperature]),
    el('button', { type: 'submit', 'data-testid': 'cfg-save' }, ['Save']),
    saved,
    errors,
  ])
  form.addEventListener('submit', async (event) => {
    event.preventDefault()
    errors.replaceChildren()
    saved.replaceChildren()
    const body: Record<string, unknown> = {
      model_id: model.value,
      base_prompt: basePrompt.value,
      guard_min_run: Number(minRun.value),
      guard_policy: policy.value,
      temperature: Number(temperature.value),
    }
    if (maxTurns.value === '') body.clear_max_turns = true
    else body.max_turns = Number(maxTurns.value)
    try {
      await ctx.api.updateConfig(body)
      saved.append('Saved.')
    } catch (error) {
      errors.append(
        errorBox(error instanceof ApiError ? error.detail : String(error)),
      )
    }
  })
  return { element: el('main', {}, [form]) }
}

export async function SubmissionsPage(ctx: Ctx, homeworkId: string): Promise<Page> {
  const homework = await ctx.api.getHomework(homeworkId)
  const body = el('tbody', { 'data-testid': 'submission-rows' })

  async function refresh() {
    const rows = await ctx.api.listSubmissions(homeworkId)
    body.replaceChildren()
    for (const row of rows) {
      const view = el(
        'button',
        { 'data-testid': `view-${row.student_id}` },
        ['View transcript'],
      )
      if (!row.session_id) view.disabled = true
      else {
        const sessionId = row.session_id
        view.addEventListener('click', () =>
          ctx.store.navigate({ page: 'transcript', sessionId }),
        )
      }
      body.append(
        el('tr', { 'data-student': row.student_display_name }, [
          el('td', {}, [row.student_display_name]),
          el('td', {}, [statusBadge(row.status)]),
          el('td', {}, [
            row.last_activity_at
              ? new Date(row.last_activity_at).toLocaleString()
              : '—',
          ]),
          el('td', {}, [view]),
        ]),
      )
    }
  }

  await refresh()
  const timer = setInterval(() => void refresh().catch(() => {}), SUBMISSIONS_POLL_MS)
  const table = el('table', { 'data-testid': 'submissions-table' }, [
    el('thead', {}, [
      el('tr', {}, [
        el('th', {}, ['Student']),
        el('th', {}, ['Status']),
        el('th', {}, ['Last activity']),
        el('th', {}, ['']),
      ]),
    ]),
    body,
  ])
  return {
    element: el('main', {}, [
      el('h1', {}, [`Submissions: ${homework.title}`]),
      table,
    ]),
    dispose: () => clearInterval(timer),
  }
}

export async function TranscriptPage(ctx: Ctx, sessionId: string): Promise<Page> {
  const transcript = await ctx.api.getTranscript(sessionId)
  ctx.store.set({ transcript })
  const messages = renderTranscriptMessages(transcript.messages, {
    showGuard: true,
    studentName: transcript.student_display_name,
  })
  messages.setAttribute('data-testid', 'transcript-messages')

  const score = el('input', { type: 'number', 'data-testid': 'grade-score' })
  const feedback = el('textarea', { 'data-testid': 'grade-feedback' })
  const save = el('button', { type: 'submit', 'data-testid': 'grade-save' }, [
    'Save grade',
  ])
  const errors = el('div')
  const gradable = transcript.status === 'submitted'
  score.disabled = feedback.disabled = save.disabled = !gradable

  const gradeInfo = el('p', { 'data-testid': 'grade-info' }, [
    transcript.grade
      ? `Grade: ${transcript.grade.score}/100 — ${transcript.grade.feedback}`
      : gradable
        ? 'Ready to grade.'
        : 'Grading unlocks once the student submits.',
  ])
  const form = el('form', { 'data-testid': 'grade-form' }, [
    el('label', {}, ['Score (0-100) ', score]),
    el('label', {}, ['Feedback ', feedback]),
    save,
    errors,
  ])
  form.addEventListener('submit', async (event) => {
    event.preventDefault()
    errors.replaceChildren()
    try {
      await ctx.api.gradeSession(sessionId, Number(score.value), feedback.value)
      ctx.store.navigate({ page: 'transcript', sessionId })
    } catch (error) {
      errors.append(
        errorBox(error instanceof ApiError ? error.detail : String(error)),
      )
    }
  })

  return {
    element: el('main', { class: 'transcript-page' }, [
      el('header', {}, [
        el('h1', {}, [`${transcript.homework_title} — ${transcript.student_display_name}`]),
        el('span', { 'data-testid': 'transcript-status' }, [
          statusBadge(transcript.status),
        ]),
      ]),
      messages,
      gradeInfo,
      form,
    ]),
  }
}
