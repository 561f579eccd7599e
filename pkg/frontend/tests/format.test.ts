import { describe, expect, it } from "vitest";

import { displayNumber } from "../src/format.js";

describe("displayNumber", () => {
  it("is verbatim String() of the payload value", () => {
    for (const x of [0.4636476090008061, 2, 1.0000000000000004, 0.5, -3]) {
      expect(displayNumber(x)).toBe(String(x));
    }
  });

  it("round-trips through JSON without changing the displayed string", () => {
    // what the wire carries is what the user reads
    const wire = "0.7853981633974483";
    const parsed = JSON.parse(wire) as number;
    expect(displayNumber(parsed)).toBe(wire);
  });

  it("renders missing values as a dash", () => {
    expect(displayNumber(null)).toBe("-");
    expect(displayNumber(undefined)).toBe("-");
  });
});
