/**
 * Teacher projector: the all-profiles grid, the similarity network colored
 * by cluster, the picture co-engagement network, and the game controls.
 *
 * Graph drawing keeps node identity across ticks: a node that survives an
 * update keeps its position object, so the force layout continues from
 * where it was instead of rebuilding the scene.
 *
 * The advance-hint control is idempotent under double-click: while one
 * advance is in flight, further clicks send nothing until the hint (or an
 * error) comes back.
 */

import {
  AdvanceHintMessage,
  BoardMessage,
  DraftSubmitMessage,
  GraphMessage,
  HintMessage,
  ProfilePayload,
  PublishBoardMessage,
  RevealRequestMessage,
  ServerMessage,
} from "./protocol.js";
import { CloudTerm, wordCloudTerms } from "./wordCloud.js";

export interface TeacherSender {
  send(
    message:
      | AdvanceHintMessage
      | PublishBoardMessage
      | RevealRequestMessage
      | DraftSubmitMessage,
  ): boolean;
}

export interface NodeView {
  id: string;
  /** stable per-node position, seeded deterministically, mutated by layout */
  position: { x: number; y: number };
  cluster: number;
}

export interface GraphView {
  nodes: NodeView[];
  edges: [string, string, number][];
}

export interface ProfileTile {
  user: string;
  total: number;
  cloud: CloudTerm[];
}

function seededPosition(id: string): { x: number; y: number } {
  // deterministic unit-circle placement so fresh layouts do not jump
  let hash = 0;
  for (const ch of id) {
    hash = (hash * 31 + ch.charCodeAt(0)) >>> 0;
  }
  const angle = (hash % 360) * (Math.PI / 180);
  return { x: Math.cos(angle), y: Math.sin(angle) };
}

class GraphModel {
  private positions = new Map<string, { x: number; y: number }>();
  private nodes: string[] = [];
  private edges: [string, string, number][] = [];
  private clusterOf = new Map<string, number>();

  update(message: GraphMessage): void {
    const alive = new Set(message.nodes);
    for (const id of [...this.positions.keys()]) {
      if (!alive.has(id)) {
        this.positions.delete(id);
      }
    }
    for (const id of message.nodes) {
      if (!this.positions.has(id)) {
        this.positions.set(id, seededPosition(id));
      }
    }
    this.nodes = [...message.nodes];
    this.edges = message.edges.map(([u, v, w]) => [u, v, w]);
    this.clusterOf.clear();
    (message.clusters ?? []).forEach((members, index) => {
      for (const member of members) {
        this.clusterOf.set(member, index);
      }
    });
  }

  view(): GraphView {
    return {
      nodes: this.nodes.map((id) => ({
        id,
        position: this.positions.get(id)!,
        cluster: this.clusterOf.get(id) ?? -1,
      })),
      edges: [...this.edges],
    };
  }
}

export interface TeacherRenderModel {
  profilesGrid: ProfileTile[];
  classroomAffinity: CloudTerm[];
  similarity: GraphView;
  coengagement: GraphView;
  hintIndex: number;
  currentHint: HintMessage | null;
  board: BoardMessage["drafts"];
  revealed: boolean;
  lastError: string | null;
}

export class TeacherView {
  private profiles: ProfilePayload[] = [];
  private classroomAffinity: Record<string, number> = {};
  private similarity = new GraphModel();
  private coengagement = new GraphModel();
  private hintIndex = 0;
  private currentHint: HintMessage | null = null;
  private advanceInFlight = false;
  private board: BoardMessage["drafts"] = [];
  private revealed = false;
  private lastError: string | null = null;

  constructor(private readonly client: TeacherSender) {}

  // --- game controls -----------------------------------------------------

  /** Returns true when a message was actually sent (first click only). */
  clickAdvanceHint(): boolean {
    if (this.advanceInFlight) {
      return false;
    }
    const sent = this.client.send({ type: "advance_hint" });
    this.advanceInFlight = sent;
    return sent;
  }

  clickPublishBoard(): boolean {
    return this.client.send({ type: "publish_board" });
  }

  clickReveal(): boolean {
    return this.client.send({ type: "reveal" });
  }

  // --- server messages -----------------------------------------------------

  applyServer(message: ServerMessage): void {
    switch (message.type) {
      case "room_profiles":
        this.profiles = [...message.profiles];
        this.classroomAffinity = { ...message.classroom_affinity };
        break;
      case "graph":
        if (message.kind === "similarity") {
          this.similarity.update(message);
        } else {
          this.coengagement.update(message);
        }
        break;
      case "hint":
        this.hintIndex = message.index;
        this.currentHint = message;
        this.advanceInFlight = false;
        break;
      case "board":
        this.board = [...message.drafts];
        break;
      case "reveal":
        this.revealed = true;
        break;
      case "error":
        this.lastError = `${message.code}: ${message.message}`;
        this.advanceInFlight = false;
        break;
      default:
        break;
    }
  }

  render(): TeacherRenderModel {
    return {
      profilesGrid: this.profiles.map((profile) => ({
        user: profile.user,
        total: profile.total,
        cloud: wordCloudTerms(profile.affinities, 6),
      })),
      classroomAffinity: wordCloudTerms(this.classroomAffinity, 12),
      similarity: this.similarity.view(),
      coengagement: this.coengagement.view(),
      hintIndex: this.hintIndex,
      currentHint: this.currentHint,
      board: [...this.board],
      revealed: this.revealed,
      lastError: this.lastError,
    };
  }
}
