import { GatewayApi } from './api.js'
import { clear, el } from './dom.js'
import { MessagePoller } from './poller.js'
import { lastCursor, mergeMessages } from './store.js'
import { renderMessage } from './chat-view.js'
import type { ChatMessage, QueueEntry } from './types.js'

export class OperatorView {
  root: HTMLElement
  api: GatewayApi
  operator = 'sam'
  activeSession: string | null = null
  messages: ChatMessage[] = []
  poller: MessagePoller | null = null

  private queueBox: HTMLElement
  private sessionBox: HTMLElement
  private log: HTMLElement
  private replyInput: HTMLInputElement
  private repairInput: HTMLInputElement
  private status: HTMLElement
  private pollOptions: { wait?: number; intervalMs?: number }

  constructor(
    root: HTMLElement,
    api: GatewayApi,
    pollOptions: { wait?: number; intervalMs?: number } = {},
  ) {
    this.root = root
    this.api = api
    this.pollOptions = pollOptions

    const operatorInput = el('input', { class: 'operator-name', value: this.operator })
    operatorInput.addEventListener('change', () => {
      this.operator = operatorInput.value
    })
    const refresh = el('button', { type: 'button', class: 'refresh-queue' }, ['Refresh queue'])
    refresh.addEventListener('click', () => void this.refreshQueue())

    this.status = el('div', { class: 'operator-status' })
    this.queueBox = el('div', { class: 'queue' })
    this.log = el('div', { class: 'chat-log operator-log' })
    this.replyInput = el('input', { class: 'reply-input', type: 'text' })
    const replyButton = el('button', { type: 'button', class: 'reply-send' }, ['Reply'])
    replyButton.addEventListener('click', () => void this.reply())
    this.repairInput = el('input', {
      class: 'repair-input',
      type: 'text',
      placeholder: 'device serial',
    })
    const repairButton = el('button', { type: 'button', class: 'repair' }, ['Remote repair'])
    repairButton.addEventListener('click', () => void this.repair())
    const releaseButton = el('button', { type: 'button', class: 'release' }, ['Release'])
    releaseButton.addEventListener('click', () => void this.release())

    this.sessionBox = el('div', { class: 'operator-session hidden' }, [
      this.log,
      el('div', { class: 'compose-row' }, [this.replyInput, replyButton]),
      el('div', { class: 'tools-row' }, [this.repairInput, repairButton, releaseButton]),
    ])

    root.appendChild(el('div', { class: 'operator-bar' }, [operatorInput, refresh]))
    root.appendChild(this.status)
    root.appendChild(this.queueBox)
    root.appendChild(this.sessionBox)
  }

  async refreshQueue(): Promise<void> {
    const { sessions } = await this.api.operatorQueue()
    this.renderQueue(sessions)
  }

  private renderQueue(entries: QueueEntry[]) {
    clear(this.queueBox)
    if (!entries.length) {
      this.queueBox.appendChild(el('div', { class: 'queue-empty' }, ['No one is waiting.']))
      return
    }
    for (const entry of entries) {
      const take = el('button', { type: 'button', class: 'take-over' }, ['Take over'])
      take.addEventListener('click', () => void this.takeOver(entry.session_id))
      const row = el('div', { class: 'queue-entry', 'data-session': entry.session_id }, [
        el('span', { class: 'who' }, [`${entry.principal} (${entry.session_id})`]),
        el('span', { class: 'preview' }, [entry.preview]),
        take,
      ])
      this.queueBox.appendChild(row)
    }
  }

  async takeOver(sessionId: string): Promise<void> {
    try {
      await this.api.takeOver(this.operator, sessionId)
    } catch {
      await this.refreshQueue()  // somebody else got there first
      return
    }
    this.activeSession = sessionId
    this.messages = []
    this.sessionBox.className = 'operator-session'
    this.status.textContent = `Holding ${sessionId}`
    this.poller?.stop()
    this.poller = new MessagePoller(
      this.api,
      sessionId,
      (fresh) => {
        this.messages = mergeMessages(this.messages, fresh)
        this.poller?.advanceTo(lastCursor(this.messages))
        this.renderLog()
      },
      () => undefined,
      this.pollOptions,
    )
    this.poller.start()
    await this.refreshQueue()
  }

  private renderLog() {
    clear(this.log)
    for (const message of this.messages) {
      this.log.appendChild(renderMessage(message))
    }
  }

  async reply(): Promise<void> {
    if (!this.activeSession || !this.replyInput.value) return
    await this.api.operatorReply(this.operator, this.activeSession, this.replyInput.value)
    this.replyInput.value = ''
  }

  async repair(): Promise<void> {
    if (!this.repairInput.value) return
    const { device } = await this.api.remoteRepair(this.operator, this.repairInput.value)
    this.status.textContent = `${device.name} is ${device.online ? 'online' : 'offline'}`
  }

  async release(): Promise<void> {
    if (!this.activeSession) return
    await this.api.release(this.operator, this.activeSession)
    this.poller?.stop()
    this.activeSession = null
    this.sessionBox.className = 'operator-session hidden'
    this.status.textContent = 'Released.'
    await this.refreshQueue()
  }
}
