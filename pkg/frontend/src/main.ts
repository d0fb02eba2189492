import "./styles.css";

import { DomFeedback } from "./feedback";
import { MapView } from "./mapview";
import type { MapDoc, MapPoi, ModeName, WaypointMsg } from "./protocol";
import { MODE_NAMES } from "./protocol";
import { connectSession } from "./net";
import { searchDestinations } from "./search";
import { SessionController } from "./session";
import { DEFAULT_STEER, type Keys, PoseIntegrator } from "./steer";

const POSE_HZ = 10;
const RECENTS_KEY = "pulsenav.recents";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const map: MapDoc = await (await fetch("/map")).json();
  const floor = map.floors[0] ?? null;

  const canvas = el<HTMLCanvasElement>("map");
  const view = new MapView(canvas);
  const searchInput = el<HTMLInputElement>("search");
  const resultList = el<HTMLElement>("results");
  const modeSelect = el<HTMLSelectElement>("mode");
  const voiceCheck = el<HTMLInputElement>("voice");
  const speedSlider = el<HTMLInputElement>("speed");
  const speedLabel = el<HTMLElement>("speed-label");
  const arrowToggle = el<HTMLButtonElement>("arrow-toggle");
  const stopButton = el<HTMLButtonElement>("stop");
  const banner = el<HTMLElement>("banner");

  for (const name of MODE_NAMES) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    modeSelect.appendChild(opt);
  }

  const startPoi = map.pois.find((p) => map.routes.some((r) => r.from === p.id));
  const pose = new PoseIntegrator({
    x: startPoi?.x ?? 0,
    y: startPoi?.y ?? 0,
    floor: startPoi?.floor ?? floor?.id ?? "0",
    heading: 0,
  });

  let routeWaypoints: WaypointMsg[] | null = null;
  let arrowView = false;

  const feedback = new DomFeedback(
    el("pulse-strip"),
    el("caption"),
    banner,
    el("phase"),
    () => voiceCheck.checked,
    (waypoints) => {
      routeWaypoints = waypoints;
      const start = waypoints[0];
      if (start) pose.teleport(start.x, start.y, start.floor, 0);
    },
  );

  const controller = new SessionController(
    connectSession(
      `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`,
      (raw) => controller.onRaw(raw),
      (status) => {
        if (status !== "open") {
          banner.textContent = status === "closed" ? "connection lost, retrying" : "connecting";
          banner.hidden = false;
        } else {
          banner.hidden = true;
        }
      },
    ),
    feedback,
  );

  const recents: string[] = JSON.parse(localStorage.getItem(RECENTS_KEY) ?? "[]");

  function renderResults(): void {
    const hits = searchDestinations(map.pois as MapPoi[], searchInput.value, recents);
    resultList.replaceChildren(
      ...hits.map((p) => {
        const li = document.createElement("li");
        const btn = document.createElement("button");
        btn.textContent = p.name;
        btn.onclick = () => startTo(p);
        li.appendChild(btn);
        return li;
      }),
    );
  }

  function startTo(poi: MapPoi): void {
    const from = map.routes.find((r) => r.to === poi.id)?.from;
    if (!from) {
      feedback.error(`no route to ${poi.name}`);
      return;
    }
    const idx = recents.indexOf(poi.id);
    if (idx >= 0) recents.splice(idx, 1);
    recents.unshift(poi.id);
    localStorage.setItem(RECENTS_KEY, JSON.stringify(recents.slice(0, 8)));
    feedback.enableAudio();
    controller.start(from, poi.id, modeSelect.value as ModeName, voiceCheck.checked);
  }

  const keys: Keys = { forward: false, left: false, right: false };
  const keymap: Record<string, keyof Keys> = {
    ArrowUp: "forward",
    w: "forward",
    W: "forward",
    ArrowLeft: "left",
    a: "left",
    ArrowRight: "right",
    d: "right",
  };
  window.addEventListener("keydown", (ev) => {
    const k = keymap[ev.key];
    if (k && document.activeElement !== searchInput) {
      keys[k] = true;
      ev.preventDefault();
    }
  });
  window.addEventListener("keyup", (ev) => {
    const k = keymap[ev.key];
    if (k) keys[k] = false;
  });

  arrowToggle.onclick = () => {
    arrowView = !arrowView;
    arrowToggle.textContent = arrowView ? "map view" : "arrow view";
  };
  stopButton.onclick = () => controller.stop();
  searchInput.oninput = renderResults;
  speedSlider.oninput = () => {
    speedLabel.textContent = `${Number(speedSlider.value).toFixed(1)} m/s`;
  };

  setInterval(() => {
    if (controller.phase !== "idle" && !controller.arrived) {
      const frame = pose.tick(keys, 1 / POSE_HZ, {
        ...DEFAULT_STEER,
        speedMps: Number(speedSlider.value),
      });
      controller.sendPose(frame);
    }
  }, 1000 / POSE_HZ);

  function paint(): void {
    view.render({
      floor,
      route: routeWaypoints,
      pose: { x: pose.x, y: pose.y, floor: pose.floor, heading: pose.heading },
      currentWaypoint: controller.currentWaypoint,
      arrowView,
    });
    requestAnimationFrame(paint);
  }
  renderResults();
  paint();
}

boot().catch((err) => {
  const banner = document.getElementById("banner");
  if (banner) {
    banner.textContent = `failed to load: ${err}`;
    banner.hidden = false;
  }
});
