export type Author = 'user' | 'bot' | 'operator'

export interface ChatMessage {
  author: Author
  text: string
  cursor: number
  options: string[] | null
  masked: boolean
}

export interface SessionInfo {
  session_id: string
  principal: string
  mode: string
  expects_masked: boolean
}

export interface QueueEntry {
  session_id: string
  principal: string
  waiting_since: number
  preview: string
}

export interface DeviceInfo {
  serial: string
  name: string
  kind: string
  location: string
  online: boolean
  configured: boolean
  state: Record<string, unknown>
}
