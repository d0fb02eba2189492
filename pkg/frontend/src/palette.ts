// UI palette. Every foreground/background pair declared here must keep
// a WCAG contrast ratio of at least 9:1; the test suite enforces it.

export const palette = {
  background: "#0b0d10",
  panel: "#151a21",
  text: "#f2f5f7",
  accent: "#ffd166",
  route: "#8ec9ff",
  walker: "#7fe3a8",
  danger: "#ffb3ad",
  pulseDistance: "#9ad7ff",
  pulseMilestone: "#ffe28a",
  pulseDirection: "#ffd166",
} as const;

export type PaletteKey = keyof typeof palette;

/** Every (foreground, background) combination the UI actually renders. */
export const contrastPairs: [PaletteKey, PaletteKey][] = [
  ["text", "background"],
  ["text", "panel"],
  ["accent", "background"],
  ["accent", "panel"],
  ["route", "background"],
  ["walker", "background"],
  ["danger", "background"],
  ["danger", "panel"],
  ["pulseDistance", "background"],
  ["pulseDistance", "panel"],
  ["pulseMilestone", "background"],
  ["pulseMilestone", "panel"],
  ["pulseDirection", "background"],
  ["pulseDirection", "panel"],
];

export const MIN_CONTRAST = 9.0;

function channel(u: number): number {
  return u <= 0.03928 ? u / 12.92 : Math.pow((u + 0.055) / 1.055, 2.4);
}

export function relativeLuminance(hex: string): number {
  const v = hex.replace("#", "");
  const r = channel(parseInt(v.slice(0, 2), 16) / 255);
  const g = channel(parseInt(v.slice(2, 4), 16) / 255);
  const b = channel(parseInt(v.slice(4, 6), 16) / 255);
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

export function contrastRatio(a: string, b: string): number {
  const la = relativeLuminance(a);
  const lb = relativeLuminance(b);
  const [hi, lo] = la > lb ? [la, lb] : [lb, la];
  return (hi + 0.05) / (lo + 0.05);
}

export function pulseColor(meaning: string): string {
  if (meaning === "distance") return palette.pulseDistance;
  if (meaning === "completion" || meaning === "success") return palette.pulseMilestone;
  return palette.pulseDirection;
}
