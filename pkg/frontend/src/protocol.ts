/**
 * Wire protocol types shared by every view.
 *
 * One JSON object per message with a top-level "type". The views never
 * compute scores, profiles or recommendations themselves; everything they
 * show arrives in these server messages.
 */

export type Role = "student" | "analytics" | "teacher";
export type ShareScope = "private" | "friends" | "public";
export type ActionKind =
  | "view_dwell"
  | "like"
  | "unlike"
  | "emoji"
  | "comment"
  | "share"
  | "follow"
  | "inactivity";

export interface ClientAction {
  kind: ActionKind;
  image?: string;
  dwell_ms?: number;
  emoji_code?: string;
  comment_len?: number;
  share_scope?: ShareScope;
  followee?: string;
  gap_ms?: number;
}

export interface HelloMessage {
  type: "hello";
  room: string;
  role: Role;
  nickname?: string;
}

export interface PairMessage {
  type: "pair";
  code: string;
}

export interface ActionMessage {
  type: "action";
  action: ClientAction;
  nonce: string;
}

export interface AdvanceHintMessage {
  type: "advance_hint";
}

export interface DraftSubmitMessage {
  type: "draft_submit";
  draft: { fields: Record<string, string>; tags?: string[] };
}

export interface PublishBoardMessage {
  type: "publish_board";
}

export interface RevealRequestMessage {
  type: "reveal";
}

export type ClientMessage =
  | HelloMessage
  | PairMessage
  | ActionMessage
  | AdvanceHintMessage
  | DraftSubmitMessage
  | PublishBoardMessage
  | RevealRequestMessage;

export interface EventEntry {
  seq: number;
  room: string;
  user: string;
  ts_server: number;
  kind: ActionKind;
  image?: string;
  dwell_ms?: number;
  emoji_code?: string;
  comment_len?: number;
  share_scope?: ShareScope;
  followee?: string;
  gap_ms?: number;
}

export interface QueueSlot {
  image: string;
  score: number;
  content_part: number;
  collab_part: number;
  popularity_part: number;
  explain_topics: [string, number][];
  explain_users: [string, number, number][];
  explored: boolean;
}

export interface ProfilePayload {
  user: string;
  affinities: Record<string, number>;
  total: number;
}

export interface WelcomeMessage {
  type: "welcome";
  session: string;
  role: Role;
  user: string | null;
  pairing_code?: string;
}

export interface PairedMessage {
  type: "paired";
  session: string;
  student_user: string;
}

export interface AckMessage {
  type: "ack";
  seq: number;
  nonce?: string;
}

export interface FeedMessage {
  type: "feed";
  images: string[];
}

export interface LogTailMessage {
  type: "log_tail";
  events: EventEntry[];
}

export interface EngagementMessage {
  type: "engagement";
  user: string;
  cells: { image: string; score: number; components: Record<string, number> }[];
}

export interface ProfileMessage extends ProfilePayload {
  type: "profile";
}

export interface QueueMessage {
  type: "queue";
  slots: QueueSlot[];
}

export interface RoomProfilesMessage {
  type: "room_profiles";
  profiles: ProfilePayload[];
  classroom_affinity: Record<string, number>;
}

export interface GraphMessage {
  type: "graph";
  kind: "similarity" | "coengagement";
  nodes: string[];
  edges: [string, string, number][];
  clusters?: string[][];
}

export interface HintMessage {
  type: "hint";
  index: number;
  id: string;
  text: string;
  prompts: string[];
}

export interface DraftAckMessage {
  type: "draft_ack";
  version: number;
}

export interface BoardMessage {
  type: "board";
  drafts: {
    pair_id: string;
    fields: Record<string, string>;
    tags: string[];
    version: number;
  }[];
}

export interface RevealMessage {
  type: "reveal";
  solution: { attributes: Record<string, string>; narrative: string };
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage =
  | WelcomeMessage
  | PairedMessage
  | AckMessage
  | FeedMessage
  | LogTailMessage
  | EngagementMessage
  | ProfileMessage
  | QueueMessage
  | RoomProfilesMessage
  | GraphMessage
  | HintMessage
  | DraftAckMessage
  | BoardMessage
  | RevealMessage
  | ErrorMessage;

export class ProtocolError extends Error {}

export function serialize(message: ClientMessage): string {
  return JSON.stringify(message);
}

export function parseServer(text: string): ServerMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new ProtocolError(`invalid JSON frame: ${String(err)}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ProtocolError("frame must be a JSON object");
  }
  const type = (doc as { type?: unknown }).type;
  if (typeof type !== "string") {
    throw new ProtocolError("frame missing 'type'");
  }
  return doc as ServerMessage;
}
