// Linear data-to-pixel mapping with nice tick placement.

export interface Scale {
  toPx(value: number): number;
  ticks: number[];
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
  tickTarget = 6,
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const toPx = (value: number) => r0 + ((value - d0) / span) * (r1 - r0);
  return { toPx, ticks: niceTicks(d0, d1, tickTarget), domain };
}

export function niceTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / target;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  let t = Math.ceil(lo / step) * step;
  while (t <= hi + 1e-9) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : Number(t.toPrecision(12)));
    t += step;
  }
  return ticks;
}

export function formatTick(value: number): string {
  const rounded = Number(value.toPrecision(10));
  return Object.is(rounded, -0) ? "0" : String(rounded);
}
