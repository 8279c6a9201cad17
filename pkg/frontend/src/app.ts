import { GatewayApi } from './api.js'
import { ChatView } from './chat-view.js'
import { clear, el } from './dom.js'
import { OperatorView } from './operator-view.js'

/** Single-page app with a user/operator role switcher. */
export class App {
  root: HTMLElement
  chat: ChatView | null = null
  operator: OperatorView | null = null

  private userPane: HTMLElement
  private operatorPane: HTMLElement

  constructor(root: HTMLElement, baseUrl: string, pollOptions: { wait?: number; intervalMs?: number } = {}) {
    this.root = root
    clear(root)

    const api = new GatewayApi(baseUrl)
    this.userPane = el('div', { class: 'pane user-pane' })
    this.operatorPane = el('div', { class: 'pane operator-pane hidden' })

    const userTab = el('button', { type: 'button', class: 'tab tab-user' }, ['Chat'])
    const operatorTab = el('button', { type: 'button', class: 'tab tab-operator' }, [
      'Operator console',
    ])
    userTab.addEventListener('click', () => this.show('user'))
    operatorTab.addEventListener('click', () => this.show('operator'))

    root.appendChild(el('div', { class: 'tabs' }, [userTab, operatorTab]))
    root.appendChild(this.userPane)
    root.appendChild(this.operatorPane)

    this.chat = new ChatView(this.userPane, api, pollOptions)
    this.operator = new OperatorView(this.operatorPane, api, pollOptions)
  }

  show(role: 'user' | 'operator') {
    this.userPane.className = role === 'user' ? 'pane user-pane' : 'pane user-pane hidden'
    this.operatorPane.className =
      role === 'operator' ? 'pane operator-pane' : 'pane operator-pane hidden'
    if (role === 'operator') void this.operator?.refreshQueue()
  }
}

declare global {
  interface Window {
    iotchatApp?: App
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  const params = new URLSearchParams(window.location.search)
  const base = params.get('gateway') ?? `${window.location.protocol}//${window.location.host}`
  window.iotchatApp = new App(document.getElementById('app') as HTMLElement, base)
}
