import { createApp } from './app'

declare global {
  interface Window {
    LLTEACHER_API_BASE?: string
  }
}

const base = window.LLTEACHER_API_BASE ?? ''
const mount = document.getElementById('app')
if (!mount) throw new Error('missing #app mount point')
createApp(base, mount)
