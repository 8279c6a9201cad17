import type { ChatMessage } from './types.js'

export const MASK = '*****'

/**
 * Merge freshly polled messages into the stream. Keyed by cursor, so
 * re-polling the same range is idempotent; result stays in cursor order.
 */
export function mergeMessages(existing: ChatMessage[], incoming: ChatMessage[]): ChatMessage[] {
  const byCursor = new Map<number, ChatMessage>()
  for (const message of existing) byCursor.set(message.cursor, message)
  for (const message of incoming) byCursor.set(message.cursor, message)
  return [...byCursor.values()].sort((a, b) => a.cursor - b.cursor)
}

export function lastCursor(messages: ChatMessage[]): number {
  return messages.length ? messages[messages.length - 1].cursor : -1
}

/** The only text allowed into the DOM; masked content never leaves here. */
export function displayText(message: ChatMessage): string {
  return message.masked ? MASK : message.text
}

/** Quick-reply button labels: the gateway's order with 1-based numbering. */
export function quickReplyLabels(options: string[]): string[] {
  return options.map((label, index) => `${index + 1}) ${label}`)
}
