/**
 * Reconnecting protocol client.
 *
 * Every user gesture becomes at most one action message, stamped with a
 * client-generated nonce. Actions stay in the pending queue until the
 * server acks their nonce; on reconnect the hello is resent and the pending
 * actions are replayed once each with their original nonces, so the server
 * can deduplicate resends that raced a disconnect.
 */

import {
  ClientAction,
  ClientMessage,
  HelloMessage,
  parseServer,
  serialize,
  ServerMessage,
  ActionMessage,
} from "./protocol.js";

/** Minimal WebSocket-shaped surface so tests can supply fake transports. */
export interface WireSocket {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((data: string) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = () => WireSocket;

export class SocketClient {
  private socket: WireSocket | null = null;
  private pending: ActionMessage[] = [];
  private nonceCounter = 0;
  connected = false;

  onServer: (message: ServerMessage) => void = () => {};
  onStatus: (connected: boolean) => void = () => {};

  constructor(
    private readonly factory: SocketFactory,
    private readonly hello: HelloMessage,
    private readonly noncePrefix: string = "n",
  ) {}

  connect(): void {
    const socket = this.factory();
    this.socket = socket;
    socket.onopen = () => {
      this.connected = true;
      this.onStatus(true);
      socket.send(serialize(this.hello));
      for (const queued of this.pending) {
        socket.send(serialize(queued));
      }
    };
    socket.onmessage = (data: string) => {
      const message = parseServer(data);
      if (message.type === "ack" && message.nonce !== undefined) {
        this.pending = this.pending.filter((p) => p.nonce !== message.nonce);
      }
      this.onServer(message);
    };
    socket.onclose = () => {
      this.connected = false;
      this.socket = null;
      this.onStatus(false);
    };
  }

  /** Queue one action; sends immediately when connected. Returns the nonce. */
  sendAction(action: ClientAction): string {
    this.nonceCounter += 1;
    const message: ActionMessage = {
      type: "action",
      action,
      nonce: `${this.noncePrefix}-${this.nonceCounter}`,
    };
    this.pending.push(message);
    if (this.connected && this.socket) {
      this.socket.send(serialize(message));
    }
    return message.nonce;
  }

  /** Fire-and-forget for non-action messages (pair, game controls). */
  send(message: Exclude<ClientMessage, ActionMessage | HelloMessage>): boolean {
    if (!this.connected || !this.socket) {
      return false;
    }
    this.socket.send(serialize(message));
    return true;
  }

  pendingCount(): number {
    return this.pending.length;
  }
}
