import { describe, expect, it } from "vitest";

import {
  MIN_CONTRAST,
  contrastPairs,
  contrastRatio,
  palette,
  pulseColor,
} from "../src/palette";

describe("palette contrast", () => {
  it("every declared fg/bg pair meets the 9:1 ratio", () => {
    for (const [fg, bg] of contrastPairs) {
      const ratio = contrastRatio(palette[fg], palette[bg]);
      expect(ratio, `${fg} on ${bg} = ${ratio.toFixed(2)}`).toBeGreaterThanOrEqual(
        MIN_CONTRAST,
      );
    }
  });

  it("covers every foreground color against the dark background", () => {
    const foregrounds = Object.keys(palette).filter(
      (k) => k !== "background" && k !== "panel",
    );
    const declared = new Set(contrastPairs.map(([fg, bg]) => `${fg}/${bg}`));
    for (const fg of foregrounds) {
      expect(declared.has(`${fg}/background`), `${fg} missing`).toBe(true);
    }
  });

  it("body text is far above the minimum", () => {
    expect(contrastRatio(palette.text, palette.background)).toBeGreaterThan(15);
  });

  it("known reference values compute correctly", () => {
    expect(contrastRatio("#ffffff", "#000000")).toBeCloseTo(21, 5);
    expect(contrastRatio("#000000", "#ffffff")).toBeCloseTo(21, 5);
    expect(contrastRatio("#777777", "#777777")).toBeCloseTo(1, 5);
  });

  it("every pulse meaning maps to a palette color", () => {
    for (const meaning of ["distance", "completion", "success", "direction", "ping"]) {
      const color = pulseColor(meaning);
      expect(Object.values(palette)).toContain(color);
      expect(contrastRatio(color, palette.background)).toBeGreaterThanOrEqual(
        MIN_CONTRAST,
      );
    }
  });
});
