import type { GatewayApi } from './api.js'
import type { ChatMessage } from './types.js'

/**
 * Cursor-based message poller with at most one request in flight.
 * Long-polls the gateway (`wait`) and reschedules itself; stateless across
 * reconnects because the cursor is the only progress marker.
 */
export class MessagePoller {
  private running = false
  private timer: ReturnType<typeof setTimeout> | null = null

  constructor(
    private api: GatewayApi,
    private sessionId: string,
    private onMessages: (messages: ChatMessage[]) => void,
    private onError: (error: unknown) => void,
    private options: { wait?: number; intervalMs?: number } = {},
  ) {}

  private cursor = -1

  start(fromCursor = -1) {
    if (this.running) return
    this.cursor = fromCursor
    this.running = true
    void this.loop()
  }

  stop() {
    this.running = false
    if (this.timer !== null) {
      clearTimeout(this.timer)
      this.timer = null
    }
  }

  advanceTo(cursor: number) {
    if (cursor > this.cursor) this.cursor = cursor
  }

  private async loop(): Promise<void> {
    while (this.running) {
      try {
        const { messages } = await this.api.messagesSince(
          this.sessionId,
          this.cursor,
          this.options.wait ?? 10,
        )
        if (!this.running) return
        if (messages.length) {
          this.cursor = Math.max(this.cursor, messages[messages.length - 1].cursor)
          this.onMessages(messages)
        }
      } catch (error) {
        if (!this.running) return
        this.onError(error)
      }
      await new Promise((resolve) => {
        this.timer = setTimeout(resolve, this.options.intervalMs ?? 250)
      })
    }
  }
}
