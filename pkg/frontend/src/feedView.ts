/**
 * Student feed view model: an infinite image feed with like / emoji /
 * comment / share / follow controls.
 *
 * Every gesture maps to exactly one wire action. Likes toggle optimistically
 * and are reconciled when the ack for their nonce arrives. Dwell is reported
 * from visibility enter/leave timestamps supplied by the host (which applies
 * the >= 50% visibility rule); inactivity fires once after 30 s without any
 * interaction.
 */

import { ClientAction, ServerMessage, ShareScope } from "./protocol.js";

export const IDLE_THRESHOLD_MS = 30_000;

export interface ActionSender {
  sendAction(action: ClientAction): string;
}

interface PendingToggle {
  nonce: string;
  image: string;
  previous: boolean;
}

export interface FeedRenderModel {
  images: string[];
  liked: string[];
  banner: string | null;
  queuedNotice: boolean;
}

export class FeedView {
  images: string[] = [];
  private likedSet = new Set<string>();
  private pendingToggles: PendingToggle[] = [];
  private visibleImage: { image: string; sinceMs: number } | null = null;
  private lastActivityMs: number;
  private idleReported = false;
  private connected = true;

  constructor(
    private readonly client: ActionSender,
    private readonly now: () => number = () => Date.now(),
  ) {
    this.lastActivityMs = this.now();
  }

  // --- server messages ------------------------------------------------------

  applyServer(message: ServerMessage): void {
    switch (message.type) {
      case "feed":
        this.images = [...message.images];
        break;
      case "ack": {
        if (message.nonce !== undefined) {
          this.pendingToggles = this.pendingToggles.filter(
            (t) => t.nonce !== message.nonce,
          );
        }
        break;
      }
      case "error": {
        // replies arrive in request order, so the oldest unconfirmed
        // toggle is the one the server rejected
        const failed = this.pendingToggles.shift();
        if (failed) {
          if (failed.previous) {
            this.likedSet.add(failed.image);
          } else {
            this.likedSet.delete(failed.image);
          }
        }
        break;
      }
      default:
        break;
    }
  }

  setConnected(connected: boolean): void {
    this.connected = connected;
  }

  // --- gestures (one wire action each) -------------------------------------

  tapLike(image: string): void {
    this.touch();
    const wasLiked = this.likedSet.has(image);
    const nonce = this.client.sendAction({
      kind: wasLiked ? "unlike" : "like",
      image,
    });
    if (wasLiked) {
      this.likedSet.delete(image);
    } else {
      this.likedSet.add(image);
    }
    this.pendingToggles.push({ nonce, image, previous: wasLiked });
  }

  tapEmoji(image: string, code: string): void {
    this.touch();
    this.client.sendAction({ kind: "emoji", image, emoji_code: code });
  }

  submitComment(image: string, text: string): void {
    this.touch();
    // only the length travels; comment text never leaves the device
    this.client.sendAction({ kind: "comment", image, comment_len: text.length });
  }

  tapShare(image: string, scope: ShareScope): void {
    this.touch();
    this.client.sendAction({ kind: "share", image, share_scope: scope });
  }

  tapFollow(followee: string, image?: string): void {
    this.touch();
    const action: ClientAction = { kind: "follow", followee };
    if (image !== undefined) {
      action.image = image;
    }
    this.client.sendAction(action);
  }

  // --- dwell and inactivity --------------------------------------------------

  imageVisible(image: string): void {
    const nowMs = this.now();
    if (this.visibleImage && this.visibleImage.image !== image) {
      this.flushDwell(nowMs);
    }
    this.visibleImage = { image, sinceMs: nowMs };
  }

  imageHidden(image: string): void {
    if (this.visibleImage && this.visibleImage.image === image) {
      this.flushDwell(this.now());
    }
  }

  private flushDwell(nowMs: number): void {
    if (!this.visibleImage) {
      return;
    }
    const dwell = Math.max(0, Math.round(nowMs - this.visibleImage.sinceMs));
    this.client.sendAction({
      kind: "view_dwell",
      image: this.visibleImage.image,
      dwell_ms: dwell,
    });
    this.visibleImage = null;
    this.touch(nowMs);
  }

  /** Host calls periodically; fires one inactivity trace per idle period. */
  checkIdle(): void {
    const nowMs = this.now();
    const gap = nowMs - this.lastActivityMs;
    if (gap >= IDLE_THRESHOLD_MS && !this.idleReported) {
      this.client.sendAction({ kind: "inactivity", gap_ms: Math.round(gap) });
      this.idleReported = true;
    }
  }

  private touch(nowMs?: number): void {
    this.lastActivityMs = nowMs ?? this.now();
    this.idleReported = false;
  }

  // --- render ----------------------------------------------------------------

  isLiked(image: string): boolean {
    return this.likedSet.has(image);
  }

  render(): FeedRenderModel {
    return {
      images: [...this.images],
      liked: [...this.likedSet].sort(),
      banner: this.connected ? null : "connection lost, actions will be replayed",
      queuedNotice: !this.connected,
    };
  }
}
