// Renders server feedback: audio-channel pulses as clicks, haptic
// pulses as bars in the pulse strip (width proportional to pulse
// length), voice as captions and optional speech. Desktop browsers
// cannot vibrate, so haptic identity is preserved visually.

import { palette, pulseColor } from "./palette";
import type { PulseMsg, WaypointMsg } from "./protocol";
import type { FeedbackSink } from "./session";

export class DomFeedback implements FeedbackSink {
  private audio: AudioContext | null = null;
  audioFailed = false;

  constructor(
    private readonly strip: HTMLElement,
    private readonly caption: HTMLElement,
    private readonly banner: HTMLElement,
    private readonly phaseLabel: HTMLElement,
    private readonly speak: () => boolean,
    private readonly onRoute: (waypoints: WaypointMsg[]) => void,
  ) {}

  enableAudio(): void {
    if (this.audio) return;
    try {
      const Ctor =
        window.AudioContext ??
        (window as unknown as { webkitAudioContext?: typeof AudioContext }).webkitAudioContext;
      if (!Ctor) throw new Error("no AudioContext");
      this.audio = new Ctor();
    } catch {
      this.audioFailed = true;
      this.banner.textContent = "audio unavailable, showing pulses visually only";
      this.banner.hidden = false;
    }
  }

  route(waypoints: WaypointMsg[]): void {
    this.banner.hidden = true;
    this.onRoute(waypoints);
  }

  pulse(msg: PulseMsg): void {
    const bar = document.createElement("span");
    bar.className = "pulse-bar";
    bar.style.width = `${Math.max(6, msg.length_ms / 6)}px`;
    bar.style.background = pulseColor(msg.meaning);
    bar.title = `${msg.meaning} (${msg.source}) ${msg.length_ms} ms`;
    this.strip.appendChild(bar);
    while (this.strip.childElementCount > 40) {
      this.strip.firstElementChild?.remove();
    }
    if (msg.channel === "audio") this.click(msg.length_ms);
  }

  private click(lengthMs: number): void {
    if (!this.audio) return;
    const ctx = this.audio;
    const osc = ctx.createOscillator();
    const gain = ctx.createGain();
    osc.connect(gain);
    gain.connect(ctx.destination);
    osc.type = "square";
    osc.frequency.value = 1250;
    const t0 = ctx.currentTime;
    const dur = Math.max(lengthMs / 1000, 0.02);
    gain.gain.setValueAtTime(0.25, t0);
    gain.gain.exponentialRampToValueAtTime(0.001, t0 + dur);
    osc.start(t0);
    osc.stop(t0 + dur);
  }

  voice(text: string): void {
    this.caption.textContent = text;
    if (this.speak() && "speechSynthesis" in window) {
      window.speechSynthesis.speak(new SpeechSynthesisUtterance(text));
    }
  }

  state(phase: string, waypoint: number | null): void {
    this.phaseLabel.textContent =
      waypoint === null ? phase : `${phase} (waypoint ${waypoint})`;
    this.phaseLabel.style.color =
      phase === "off_course" ? palette.danger : palette.text;
  }

  error(message: string): void {
    this.banner.textContent = message;
    this.banner.hidden = false;
  }
}
