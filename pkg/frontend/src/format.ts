/** Display formatting.
 *
 * Numbers shown in readouts are the server's values verbatim:
 * `displayNumber` is the one formatter every readout goes through, and it
 * is pure String() conversion, so what the user reads is exactly the
 * payload field (shortest round-trip decimal of the same double).
 */

export function displayNumber(value: number | null | undefined): string {
  if (value === null || value === undefined) {
    return "-";
  }
  return String(value);
}

export function displayMatrix(data: number[][]): string {
  return data.map((row) => row.map(displayNumber).join("  ")).join("\n");
}

/** Short degree form for axis labels only (marked as derived in the UI). */
export function degreesLabel(radians: number): string {
  return `${((radians * 180) / Math.PI).toFixed(2)}°`;
}
