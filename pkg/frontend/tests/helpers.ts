/** Shared test doubles: a scripted stub server behind a fake socket. */

import { readFileSync } from "node:fs";
import { ClientAction, ServerMessage } from "../src/protocol.js";
import { WireSocket } from "../src/socketClient.js";

export interface StubOptions {
  /** when true the server processes actions but withholds the acks */
  withholdAcks?: boolean;
}

export class StubServer {
  received: Record<string, unknown>[] = [];
  private seenNonces = new Map<string, number>();
  private seq = 0;

  constructor(public options: StubOptions = {}) {}

  receive(socket: FakeSocket, data: string): void {
    const message = JSON.parse(data) as Record<string, unknown>;
    this.received.push(message);
    if (message.type === "hello") {
      socket.deliver({
        type: "welcome",
        session: "stub-session",
        role: message.role,
        user: (message.nickname as string) ?? null,
      } as ServerMessage);
      return;
    }
    if (message.type === "action") {
      const nonce = message.nonce as string;
      // dedup by nonce: a replayed action keeps its original seq
      const seq = this.seenNonces.get(nonce) ?? ++this.seq;
      this.seenNonces.set(nonce, seq);
      if (!this.options.withholdAcks) {
        socket.deliver({ type: "ack", seq, nonce });
      }
    }
  }

  actionFrames(): Record<string, unknown>[] {
    return this.received.filter((m) => m.type === "action");
  }

  ingestedCount(): number {
    return this.seenNonces.size;
  }
}

export class FakeSocket implements WireSocket {
  sent: string[] = [];
  onopen: (() => void) | null = null;
  onmessage: ((data: string) => void) | null = null;
  onclose: (() => void) | null = null;
  closed = false;

  constructor(private readonly server: StubServer) {}

  send(data: string): void {
    if (this.closed) {
      throw new Error("send on closed socket");
    }
    this.sent.push(data);
    this.server.receive(this, data);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }

  /** transport-level events the tests drive */
  open(): void {
    this.onopen?.();
  }

  drop(): void {
    this.closed = true;
    this.onclose?.();
  }

  deliver(message: ServerMessage): void {
    if (!this.closed) {
      this.onmessage?.(JSON.stringify(message));
    }
  }
}

export class RecordingSender {
  actions: ClientAction[] = [];
  messages: unknown[] = [];
  acceptSends = true;
  private counter = 0;

  sendAction(action: ClientAction): string {
    this.actions.push(action);
    this.counter += 1;
    return `rec-${this.counter}`;
  }

  send(message: unknown): boolean {
    if (!this.acceptSends) {
      return false;
    }
    this.messages.push(message);
    return true;
  }
}

export interface TickFixture {
  room: string;
  student_user: string;
  welcome: Record<string, ServerMessage>;
  tick: Record<string, ServerMessage[]>;
}

export function loadFixture(): TickFixture {
  const url = new URL("../fixtures/snapshot.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as TickFixture;
}
