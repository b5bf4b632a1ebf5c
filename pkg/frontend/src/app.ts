/**
 * Browser bootstrap: one page per role, selected by query parameters.
 *
 *   ?role=student&room=CODE&nickname=fox
 *   ?role=analytics&room=CODE
 *   ?role=teacher&room=CODE
 *
 * The page is a thin shell: a reconnecting socket, a view model, and a
 * re-render on every applied message. Gestures are delegated from the
 * container so re-rendering never drops listeners; dwell uses an
 * IntersectionObserver at the 50% visibility threshold.
 */

import { AnalyticsView } from "./analyticsView.js";
import { FeedView } from "./feedView.js";
import { HelloMessage, Role } from "./protocol.js";
import { renderAnalytics, renderFeed, renderTeacher } from "./render.js";
import { SocketClient, WireSocket } from "./socketClient.js";
import { TeacherView } from "./teacherView.js";

const RECONNECT_DELAY_MS = 1_000;
const IDLE_CHECK_MS = 5_000;

function browserSocket(url: string): WireSocket {
  const ws = new WebSocket(url);
  const wire: WireSocket = {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onopen: null,
    onmessage: null,
    onclose: null,
  };
  ws.onopen = () => wire.onopen?.();
  ws.onmessage = (event) => wire.onmessage?.(String(event.data));
  ws.onclose = () => wire.onclose?.();
  return wire;
}

function makeClient(hello: HelloMessage): SocketClient {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  const url = `${scheme}://${location.host}/ws`;
  const client = new SocketClient(() => browserSocket(url), hello);
  client.onStatus = (up) => {
    if (!up) {
      setTimeout(() => client.connect(), RECONNECT_DELAY_MS);
    }
  };
  return client;
}

function startStudent(root: HTMLElement, room: string, nickname: string): void {
  const client = makeClient({ type: "hello", room, role: "student", nickname });
  const view = new FeedView(client);
  const paint = () => {
    root.innerHTML = renderFeed(view.render());
    observeCards();
  };
  client.onServer = (message) => {
    view.applyServer(message);
    paint();
  };
  const baseStatus = client.onStatus;
  client.onStatus = (up) => {
    view.setConnected(up);
    paint();
    baseStatus(up);
  };

  const observer = new IntersectionObserver(
    (entries) => {
      for (const entry of entries) {
        const image = (entry.target as HTMLElement).dataset.image!;
        if (entry.isIntersecting) {
          view.imageVisible(image);
        } else {
          view.imageHidden(image);
        }
      }
    },
    { threshold: 0.5 },
  );
  const observeCards = () => {
    root.querySelectorAll(".card").forEach((card) => observer.observe(card));
  };

  root.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest("button[data-gesture]");
    if (!button) {
      return;
    }
    const image = (button.closest(".card") as HTMLElement).dataset.image!;
    switch ((button as HTMLElement).dataset.gesture) {
      case "like":
        view.tapLike(image);
        break;
      case "emoji":
        view.tapEmoji(image, "heart");
        break;
      case "comment": {
        const text = prompt("comment") ?? "";
        if (text) {
          view.submitComment(image, text);
        }
        break;
      }
      case "share":
        view.tapShare(image, "friends");
        break;
      case "follow": {
        const who = prompt("follow whom?") ?? "";
        if (who) {
          view.tapFollow(who, image);
        }
        break;
      }
    }
    paint();
  });

  setInterval(() => view.checkIdle(), IDLE_CHECK_MS);
  client.connect();
  paint();
}

function startAnalytics(root: HTMLElement, room: string): void {
  const client = makeClient({ type: "hello", room, role: "analytics" });
  const view = new AnalyticsView(client);
  const paint = () => {
    root.innerHTML = renderAnalytics(view.render());
  };
  client.onServer = (message) => {
    view.applyServer(message);
    paint();
  };
  root.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = root.querySelector<HTMLInputElement>("input[name=code]");
    if (input && input.value) {
      view.submitPairingCode(input.value.trim());
    }
  });
  client.connect();
  paint();
}

function startTeacher(root: HTMLElement, room: string): void {
  const client = makeClient({ type: "hello", room, role: "teacher" });
  const view = new TeacherView(client);
  const paint = () => {
    root.innerHTML = renderTeacher(view.render());
  };
  client.onServer = (message) => {
    view.applyServer(message);
    paint();
  };
  root.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest("button[data-control]");
    if (!button) {
      return;
    }
    switch ((button as HTMLElement).dataset.control) {
      case "advance":
        view.clickAdvanceHint();
        break;
      case "board":
        view.clickPublishBoard();
        break;
      case "reveal":
        view.clickReveal();
        break;
    }
  });
  client.connect();
  paint();
}

export function boot(root: HTMLElement): void {
  const params = new URLSearchParams(location.search);
  const role = (params.get("role") ?? "student") as Role;
  const room = params.get("room") ?? "";
  if (!room) {
    root.innerHTML = "<p>missing ?room=CODE</p>";
    return;
  }
  if (role === "student") {
    startStudent(root, room, params.get("nickname") ?? "anon");
  } else if (role === "analytics") {
    startAnalytics(root, room);
  } else {
    startTeacher(root, room);
  }
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    boot(root);
  }
}
