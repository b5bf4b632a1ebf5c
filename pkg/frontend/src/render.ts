/**
 * HTML renderers for the three pages. Pure render-model -> markup string
 * functions so the browser hosts stay a thin shell; all behavior lives in
 * the view models.
 */

import { AnalyticsRenderModel } from "./analyticsView.js";
import { FeedRenderModel } from "./feedView.js";
import { GraphView, TeacherRenderModel } from "./teacherView.js";
import { CloudTerm } from "./wordCloud.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function cloudHtml(terms: CloudTerm[]): string {
  const spans = terms
    .map(
      (t) =>
        `<span class="cloud-term" style="font-size:${t.scale.toFixed(2)}em">` +
        `${escapeHtml(t.topic)}</span>`,
    )
    .join(" ");
  return `<div class="word-cloud">${spans}</div>`;
}

export function renderFeed(model: FeedRenderModel): string {
  const banner = model.banner
    ? `<div class="banner">${escapeHtml(model.banner)}</div>`
    : "";
  const cards = model.images
    .map((image) => {
      const liked = model.liked.includes(image) ? " liked" : "";
      return (
        `<article class="card" data-image="${escapeHtml(image)}">` +
        `<img src="/images/${escapeHtml(image)}.jpg" alt="">` +
        `<div class="controls">` +
        `<button data-gesture="like" class="like${liked}">&#10084;</button>` +
        `<button data-gesture="emoji">&#128512;</button>` +
        `<button data-gesture="comment">&#128172;</button>` +
        `<button data-gesture="share">&#8618;</button>` +
        `<button data-gesture="follow">+</button>` +
        `</div></article>`
      );
    })
    .join("");
  return `${banner}<section class="feed">${cards}</section>`;
}

export function renderAnalytics(model: AnalyticsRenderModel): string {
  if (!model.paired) {
    return (
      `<form class="pairing"><label>pairing code ` +
      `<input name="code" maxlength="6" inputmode="numeric"></label>` +
      `<button type="submit">pair</button></form>`
    );
  }
  const log = model.log
    .map((line) => `<li data-seq="${line.seq}">${escapeHtml(line.text)}</li>`)
    .join("");
  const bars = model.bars
    .map(
      (bar) =>
        `<div class="bar-row"><span>${escapeHtml(bar.image)}</span>` +
        `<div class="bar" style="width:${(bar.fraction * 100).toFixed(1)}%"></div>` +
        `<span>${bar.score.toFixed(1)}</span></div>`,
    )
    .join("");
  const queue = model.queue
    .map((slot) => {
      const topics = slot.popover.topics
        .map((t) => `${escapeHtml(t.topic)} (${t.contribution.toFixed(2)})`)
        .join(", ");
      const users = slot.popover.users
        .map((u) => `${escapeHtml(u.user)} (sim ${u.similarity.toFixed(2)})`)
        .join(", ");
      const flag = slot.explored ? " explored" : "";
      return (
        `<li class="slot${flag}"><strong>${escapeHtml(slot.image)}</strong>` +
        ` score ${slot.score.toFixed(3)}` +
        `<div class="popover">topics: ${topics || "none yet"}<br>` +
        `similar users: ${users || "none yet"}</div></li>`
      );
    })
    .join("");
  return (
    `<header>watching <strong>${escapeHtml(model.studentUser ?? "")}</strong>` +
    ` · total engagement ${model.totalEngagement.toFixed(1)}</header>` +
    `<section class="panel log"><h2>action log</h2><ul>${log}</ul></section>` +
    `<section class="panel bars"><h2>engagement per image</h2>${bars}</section>` +
    `<section class="panel cloud"><h2>profile</h2>${cloudHtml(model.wordCloud)}</section>` +
    `<section class="panel queue"><h2>next 5</h2><ol>${queue}</ol></section>`
  );
}

function graphSvg(graph: GraphView, size = 420): string {
  const half = size / 2;
  const radius = half * 0.85;
  const place = (p: { x: number; y: number }) => ({
    x: half + p.x * radius,
    y: half + p.y * radius,
  });
  const positions = new Map(
    graph.nodes.map((n) => [n.id, place(n.position)]),
  );
  const edges = graph.edges
    .map(([u, v, w]) => {
      const a = positions.get(u);
      const b = positions.get(v);
      if (!a || !b) {
        return "";
      }
      return (
        `<line x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}" ` +
        `x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}" ` +
        `stroke-width="${Math.max(1, Math.min(6, w)).toFixed(1)}"/>`
      );
    })
    .join("");
  const nodes = graph.nodes
    .map((n) => {
      const p = positions.get(n.id)!;
      return (
        `<g class="cluster-${n.cluster}" data-node="${escapeHtml(n.id)}">` +
        `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="9"/>` +
        `<text x="${p.x.toFixed(1)}" y="${(p.y - 12).toFixed(1)}">` +
        `${escapeHtml(n.id)}</text></g>`
      );
    })
    .join("");
  return `<svg viewBox="0 0 ${size} ${size}">${edges}${nodes}</svg>`;
}

export function renderTeacher(model: TeacherRenderModel): string {
  const tiles = model.profilesGrid
    .map(
      (tile) =>
        `<div class="tile" data-user="${escapeHtml(tile.user)}">` +
        `<h3>${escapeHtml(tile.user)}</h3>${cloudHtml(tile.cloud)}</div>`,
    )
    .join("");
  const hint = model.currentHint
    ? `<blockquote>${escapeHtml(model.currentHint.text)}</blockquote>`
    : "<em>no hint shown yet</em>";
  const board = model.board
    .map(
      (draft) =>
        `<div class="draft"><h4>${escapeHtml(draft.pair_id)} v${draft.version}</h4>` +
        Object.entries(draft.fields)
          .map(([k, v]) => `<p>${escapeHtml(k)}: ${escapeHtml(v)}</p>`)
          .join("") +
        `</div>`,
    )
    .join("");
  const error = model.lastError
    ? `<div class="error">${escapeHtml(model.lastError)}</div>`
    : "";
  return (
    `${error}<section class="panel grid"><h2>profiles</h2>${tiles}</section>` +
    `<section class="panel"><h2>classroom topics</h2>` +
    `${cloudHtml(model.classroomAffinity)}</section>` +
    `<section class="panel"><h2>similarity network</h2>` +
    `${graphSvg(model.similarity)}</section>` +
    `<section class="panel"><h2>co-engagement network</h2>` +
    `${graphSvg(model.coengagement)}</section>` +
    `<section class="panel game"><h2>game · hint ${model.hintIndex}</h2>${hint}` +
    `<button data-control="advance">advance hint</button>` +
    `<button data-control="board">publish board</button>` +
    `<button data-control="reveal">reveal</button>` +
    `<div class="board">${board}</div></section>`
  );
}
