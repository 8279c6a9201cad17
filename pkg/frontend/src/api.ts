import type { ChatMessage, DeviceInfo, QueueEntry, SessionInfo } from './types.js'

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message)
  }
}

/** Thin typed wrapper over the gateway HTTP API. */
export class GatewayApi {
  constructor(public baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    })
    if (!response.ok) {
      let code = 'HttpError'
      let message = response.statusText
      try {
        const data = (await response.json()) as { error_code?: string; message?: string }
        code = data.error_code ?? code
        message = data.message ?? message
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(code, message, response.status)
    }
    return response.json() as Promise<T>
  }

  openSession(principal: string) {
    return this.request<{ session_id: string }>('POST', '/api/sessions', { principal })
  }

  sendMessage(sessionId: string, text: string) {
    return this.request<{ messages: ChatMessage[] }>(
      'POST',
      `/api/sessions/${sessionId}/messages`,
      { text },
    )
  }

  messagesSince(sessionId: string, since: number, wait = 0) {
    return this.request<{ messages: ChatMessage[] }>(
      'GET',
      `/api/sessions/${sessionId}/messages?since=${since}&wait=${wait}`,
    )
  }

  sessionInfo(sessionId: string) {
    return this.request<SessionInfo>('GET', `/api/sessions/${sessionId}`)
  }

  operatorQueue() {
    return this.request<{ sessions: QueueEntry[] }>('GET', '/api/operator/queue')
  }

  takeOver(operator: string, sessionId: string) {
    return this.request<{ ok: boolean }>('POST', `/api/operator/sessions/${sessionId}/takeover`, {
      operator,
    })
  }

  operatorReply(operator: string, sessionId: string, text: string) {
    return this.request<{ message: ChatMessage }>(
      'POST',
      `/api/operator/sessions/${sessionId}/reply`,
      { operator, text },
    )
  }

  release(operator: string, sessionId: string) {
    return this.request<{ ok: boolean }>('POST', `/api/operator/sessions/${sessionId}/release`, {
      operator,
    })
  }

  remoteRepair(operator: string, serial: string) {
    return this.request<{ device: DeviceInfo }>('POST', '/api/operator/repair', {
      operator,
      serial,
    })
  }

  devices(principal: string) {
    return this.request<{ devices: DeviceInfo[] }>(
      'GET',
      `/devices?principal=${encodeURIComponent(principal)}`,
    )
  }
}
