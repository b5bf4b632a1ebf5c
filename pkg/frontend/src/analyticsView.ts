/**
 * Paired analytics device: pairing-code entry plus the live panels that make
 * the platform's bookkeeping visible for one student.
 *
 * Panels render server data only: the scrolling action log, engagement per
 * image, the word-cloud profile, and the next-5 queue with explanation
 * popovers (at most 3 topics and 3 similar users each, straight from the
 * recommendation slots).
 */

import {
  EventEntry,
  PairMessage,
  QueueSlot,
  ServerMessage,
} from "./protocol.js";
import { CloudTerm, wordCloudTerms } from "./wordCloud.js";

export const LOG_PANEL_LIMIT = 200;
export const WORD_CLOUD_TERMS = 12;

export interface PairSender {
  send(message: PairMessage): boolean;
}

export interface LogLine {
  seq: number;
  text: string;
}

export interface EngagementBar {
  image: string;
  score: number;
  /** share of the largest bar, for widths in [0, 1] */
  fraction: number;
}

export interface QueuePopover {
  topics: { topic: string; contribution: number }[];
  users: { user: string; similarity: number; engagement: number }[];
}

export interface QueueSlotView {
  image: string;
  score: number;
  explored: boolean;
  popover: QueuePopover;
}

export interface AnalyticsRenderModel {
  paired: boolean;
  studentUser: string | null;
  log: LogLine[];
  bars: EngagementBar[];
  wordCloud: CloudTerm[];
  totalEngagement: number;
  queue: QueueSlotView[];
}

export function describeEvent(event: EventEntry): string {
  switch (event.kind) {
    case "view_dwell":
      return `viewed ${event.image} for ${event.dwell_ms} ms`;
    case "like":
      return `liked ${event.image}`;
    case "unlike":
      return `removed like on ${event.image}`;
    case "emoji":
      return `reacted ${event.emoji_code} on ${event.image}`;
    case "comment":
      return `commented on ${event.image} (${event.comment_len} chars)`;
    case "share":
      return `shared ${event.image} (${event.share_scope})`;
    case "follow":
      return event.image
        ? `followed ${event.followee} from ${event.image}`
        : `followed ${event.followee}`;
    case "inactivity":
      return `inactive for ${event.gap_ms} ms`;
  }
}

function slotView(slot: QueueSlot): QueueSlotView {
  return {
    image: slot.image,
    score: slot.score,
    explored: slot.explored,
    popover: {
      topics: slot.explain_topics
        .slice(0, 3)
        .map(([topic, contribution]) => ({ topic, contribution })),
      users: slot.explain_users
        .slice(0, 3)
        .map(([user, similarity, engagement]) => ({
          user,
          similarity,
          engagement,
        })),
    },
  };
}

export class AnalyticsView {
  paired = false;
  studentUser: string | null = null;
  private log: LogLine[] = [];
  private bars: EngagementBar[] = [];
  private cloud: CloudTerm[] = [];
  private totalEngagement = 0;
  private queue: QueueSlotView[] = [];

  constructor(private readonly client: PairSender) {}

  /** Pairing-code entry; one pair message per submit. */
  submitPairingCode(code: string): boolean {
    return this.client.send({ type: "pair", code });
  }

  applyServer(message: ServerMessage): void {
    switch (message.type) {
      case "paired":
        this.paired = true;
        this.studentUser = message.student_user;
        break;
      case "log_tail": {
        const fresh = message.events.map((event) => ({
          seq: event.seq,
          text: describeEvent(event),
        }));
        // newest first, capped so the panel scrolls instead of growing
        this.log = [...fresh.reverse(), ...this.log].slice(0, LOG_PANEL_LIMIT);
        break;
      }
      case "engagement": {
        const top = Math.max(...message.cells.map((c) => c.score), 0);
        this.bars = message.cells
          .map((cell) => ({
            image: cell.image,
            score: cell.score,
            fraction: top > 0 ? cell.score / top : 0,
          }))
          .sort((a, b) => (b.score - a.score) || (a.image < b.image ? -1 : 1));
        break;
      }
      case "profile":
        this.cloud = wordCloudTerms(message.affinities, WORD_CLOUD_TERMS);
        this.totalEngagement = message.total;
        break;
      case "queue":
        this.queue = message.slots.map(slotView);
        break;
      default:
        break;
    }
  }

  render(): AnalyticsRenderModel {
    return {
      paired: this.paired,
      studentUser: this.studentUser,
      log: [...this.log],
      bars: [...this.bars],
      wordCloud: [...this.cloud],
      totalEngagement: this.totalEngagement,
      queue: [...this.queue],
    };
  }
}
