import { ApiError, GatewayApi } from './api.js'
import { clear, el } from './dom.js'
import { MessagePoller } from './poller.js'
import { displayText, lastCursor, mergeMessages, quickReplyLabels } from './store.js'
import type { ChatMessage } from './types.js'

/**
 * Render one message row. Quick-reply buttons reproduce the gateway's
 * option order with 1-based labels; clicking button i sends "i" as an
 * utterance, exactly like typing it.
 */
export function renderMessage(
  message: ChatMessage,
  onQuickReply?: (text: string) => void,
): HTMLElement {
  const row = el('div', {
    class: `msg msg-${message.author}`,
    'data-cursor': String(message.cursor),
  })
  row.appendChild(el('span', { class: 'badge' }, [message.author]))
  const body = el('span', { class: 'text' })
  body.textContent = displayText(message)
  row.appendChild(body)
  if (message.options && message.options.length && onQuickReply) {
    const buttons = el('div', { class: 'quick-replies' })
    quickReplyLabels(message.options).forEach((label, index) => {
      const button = el('button', { class: 'quick-reply', type: 'button' })
      button.textContent = label
      button.addEventListener('click', () => onQuickReply(String(index + 1)))
      buttons.appendChild(button)
    })
    row.appendChild(buttons)
  }
  return row
}

export class ChatView {
  root: HTMLElement
  api: GatewayApi
  sessionId: string | null = null
  messages: ChatMessage[] = []
  poller: MessagePoller | null = null

  private log: HTMLElement
  private input: HTMLInputElement
  private banner: HTMLElement
  private principalInput: HTMLInputElement
  private pollOptions: { wait?: number; intervalMs?: number }

  constructor(
    root: HTMLElement,
    api: GatewayApi,
    pollOptions: { wait?: number; intervalMs?: number } = {},
  ) {
    this.root = root
    this.api = api
    this.pollOptions = pollOptions

    this.banner = el('div', { class: 'banner hidden' })
    this.log = el('div', { class: 'chat-log' })
    this.input = el('input', {
      class: 'chat-input',
      type: 'text',
      placeholder: 'Say something...',
    })
    this.principalInput = el('input', { class: 'principal-input', value: 'alice' })
    const connect = el('button', { class: 'connect', type: 'button' }, ['Connect'])
    connect.addEventListener('click', () => void this.connect(this.principalInput.value))
    const send = el('button', { class: 'send', type: 'button' }, ['Send'])
    send.addEventListener('click', () => void this.send())
    this.input.addEventListener('keydown', (event) => {
      if ((event as KeyboardEvent).key === 'Enter') void this.send()
    })

    root.appendChild(el('div', { class: 'connect-row' }, [this.principalInput, connect]))
    root.appendChild(this.banner)
    root.appendChild(this.log)
    root.appendChild(el('div', { class: 'compose-row' }, [this.input, send]))
  }

  async connect(principal: string): Promise<void> {
    this.poller?.stop()
    const { session_id } = await this.api.openSession(principal)
    this.sessionId = session_id
    this.messages = []
    this.render()
    this.poller = new MessagePoller(
      this.api,
      session_id,
      (fresh) => this.absorb(fresh),
      () => this.showBanner('Connection lost; retrying...'),
      this.pollOptions,
    )
    this.poller.start()
    await this.refreshMaskedMode()
  }

  absorb(fresh: ChatMessage[]) {
    this.messages = mergeMessages(this.messages, fresh)
    this.poller?.advanceTo(lastCursor(this.messages))
    this.render()
    void this.refreshMaskedMode()
  }

  async send(textOverride?: string): Promise<void> {
    if (!this.sessionId) return
    const text = textOverride ?? this.input.value
    if (!text) return
    try {
      const { messages } = await this.api.sendMessage(this.sessionId, text)
      this.hideBanner()
      this.input.value = ''  // cleared only after a successful send
      this.absorb(messages)
    } catch (error) {
      if (error instanceof ApiError) {
        this.showBanner(`The gateway said no: ${error.message}`)
      } else {
        this.showBanner('Could not reach the gateway. Check it is running, then retry.')
      }
    }
  }

  private async refreshMaskedMode(): Promise<void> {
    if (!this.sessionId) return
    try {
      const info = await this.api.sessionInfo(this.sessionId)
      this.input.type = info.expects_masked ? 'password' : 'text'
    } catch {
      // leave the input mode as-is; the next poll will retry
    }
  }

  private showBanner(text: string) {
    this.banner.textContent = text
    this.banner.className = 'banner'
  }

  private hideBanner() {
    this.banner.className = 'banner hidden'
  }

  render() {
    clear(this.log)
    const last = this.messages[this.messages.length - 1]
    for (const message of this.messages) {
      const interactive = message === last && message.author !== 'user'
      this.log.appendChild(
        renderMessage(message, interactive ? (text) => void this.send(text) : undefined),
      )
    }
  }
}
