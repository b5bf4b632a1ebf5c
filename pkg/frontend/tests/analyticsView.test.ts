import { describe, expect, it } from "vitest";

import { AnalyticsView } from "../src/analyticsView.js";
import { ProfileMessage, QueueMessage } from "../src/protocol.js";
import { loadFixture, RecordingSender } from "./helpers.js";

function pairedViewWithFixture() {
  const fixture = loadFixture();
  const sender = new RecordingSender();
  const view = new AnalyticsView(sender);
  view.applyServer({
    type: "paired",
    session: "a1",
    student_user: fixture.student_user,
  });
  for (const message of fixture.tick.analytics!) {
    view.applyServer(message);
  }
  return { fixture, view, sender };
}

describe("AnalyticsView pairing", () => {
  it("sends one pair message per code submit", () => {
    const sender = new RecordingSender();
    const view = new AnalyticsView(sender);
    expect(view.submitPairingCode("123456")).toBe(true);
    expect(sender.messages).toEqual([{ type: "pair", code: "123456" }]);
    expect(view.render().paired).toBe(false);
    view.applyServer({ type: "paired", session: "a1", student_user: "fox" });
    expect(view.render().paired).toBe(true);
    expect(view.render().studentUser).toBe("fox");
  });

  it("reports failure when offline so the form can retry", () => {
    const sender = new RecordingSender();
    sender.acceptSends = false;
    const view = new AnalyticsView(sender);
    expect(view.submitPairingCode("123456")).toBe(false);
  });
});

describe("AnalyticsView panels from the snapshot fixture", () => {
  it("always renders exactly 5 queue slots", () => {
    const { view } = pairedViewWithFixture();
    expect(view.render().queue).toHaveLength(5);
  });

  it("popovers carry at most 3 topics and 3 similar users", () => {
    const { view } = pairedViewWithFixture();
    for (const slot of view.render().queue) {
      expect(slot.popover.topics.length).toBeLessThanOrEqual(3);
      expect(slot.popover.users.length).toBeLessThanOrEqual(3);
    }
  });

  it("word cloud shows the top-N affinities, heaviest first", () => {
    const { fixture, view } = pairedViewWithFixture();
    const profile = fixture.tick.analytics!.find(
      (m) => m.type === "profile",
    ) as ProfileMessage;
    const cloud = view.render().wordCloud;
    expect(cloud.length).toBeGreaterThan(0);
    expect(cloud.length).toBeLessThanOrEqual(12);
    const weights = cloud.map((t) => t.weight);
    expect([...weights].sort((a, b) => b - a)).toEqual(weights);
    const expectedTop = Object.entries(profile.affinities).sort(
      ([ta, wa], [tb, wb]) => (wb - wa) || (ta < tb ? -1 : 1),
    )[0]![0];
    expect(cloud[0]!.topic).toBe(expectedTop);
    expect(cloud[0]!.scale).toBe(3);
  });

  it("engagement bars are sorted and normalized to the largest", () => {
    const { view } = pairedViewWithFixture();
    const bars = view.render().bars;
    expect(bars.length).toBeGreaterThan(0);
    expect(bars[0]!.fraction).toBe(1);
    for (let i = 1; i < bars.length; i += 1) {
      expect(bars[i]!.score).toBeLessThanOrEqual(bars[i - 1]!.score);
      expect(bars[i]!.fraction).toBeGreaterThanOrEqual(0);
      expect(bars[i]!.fraction).toBeLessThanOrEqual(1);
    }
  });

  it("log panel shows newest entries first and caps its length", () => {
    const { view } = pairedViewWithFixture();
    const log = view.render().log;
    expect(log.length).toBeGreaterThan(0);
    expect(log.length).toBeLessThanOrEqual(200);
    for (let i = 1; i < log.length; i += 1) {
      expect(log[i]!.seq).toBeLessThan(log[i - 1]!.seq);
    }
    expect(log.every((line) => line.text.length > 0)).toBe(true);
  });

  it("queue scores come straight from the server slots", () => {
    const { fixture, view } = pairedViewWithFixture();
    const queueMessage = fixture.tick.analytics!.find(
      (m) => m.type === "queue",
    ) as QueueMessage;
    const rendered = view.render().queue;
    rendered.forEach((slot, i) => {
      expect(slot.image).toBe(queueMessage.slots[i]!.image);
      expect(slot.score).toBe(queueMessage.slots[i]!.score);
    });
  });
});
