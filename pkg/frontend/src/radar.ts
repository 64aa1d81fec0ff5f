// Seven-dimension evaluation radar. Pure geometry plus an SVG string
// renderer, so the chart is trivial to test and needs no chart library.

export interface RadarAxis {
  dimension: string;
  angle: number;
  endX: number;
  endY: number;
  labelX: number;
  labelY: number;
}

export interface RadarPoint {
  dimension: string;
  value: number;
  x: number;
  y: number;
}

export interface RadarGeometry {
  size: number;
  center: number;
  radius: number;
  axes: RadarAxis[];
  points: RadarPoint[];
  rings: number[][];
  // dimensions tied for the lowest score; the UI highlights these
  weakest: string[];
}

export const SCORE_MIN = 1;
export const SCORE_MAX = 5;

const LABEL_GAP = 16;

export function radarGeometry(dimensions: Record<string, number>, size = 260): RadarGeometry {
  const names = Object.keys(dimensions);
  if (names.length < 3) throw new Error(`a radar needs at least 3 dimensions, got ${names.length}`);
  const center = size / 2;
  const radius = center - 40;
  const step = (2 * Math.PI) / names.length;

  const axes: RadarAxis[] = names.map((dimension, i) => {
    const angle = -Math.PI / 2 + i * step; // first axis straight up, clockwise
    return {
      dimension,
      angle,
      endX: center + radius * Math.cos(angle),
      endY: center + radius * Math.sin(angle),
      labelX: center + (radius + LABEL_GAP) * Math.cos(angle),
      labelY: center + (radius + LABEL_GAP) * Math.sin(angle),
    };
  });

  const points: RadarPoint[] = names.map((dimension, i) => {
    const axis = axes[i]!;
    const value = clamp(dimensions[dimension] ?? SCORE_MIN);
    const r = radius * (value / SCORE_MAX);
    return {
      dimension,
      value,
      x: center + r * Math.cos(axis.angle),
      y: center + r * Math.sin(axis.angle),
    };
  });

  const rings: number[][] = [];
  for (let score = SCORE_MIN; score <= SCORE_MAX; score++) {
    rings.push(
      axes.flatMap((axis) => {
        const r = radius * (score / SCORE_MAX);
        return [center + r * Math.cos(axis.angle), center + r * Math.sin(axis.angle)];
      }),
    );
  }

  const lowest = Math.min(...names.map((name) => clamp(dimensions[name] ?? SCORE_MIN)));
  const weakest = names.filter((name) => clamp(dimensions[name] ?? SCORE_MIN) === lowest);

  return { size, center, radius, axes, points, rings, weakest };
}

export function polygonPath(points: Array<{ x: number; y: number }>): string {
  return points.map((p) => `${round2(p.x)},${round2(p.y)}`).join(' ');
}

export function renderRadarSvg(dimensions: Record<string, number>, size = 260): string {
  const geom = radarGeometry(dimensions, size);
  const parts: string[] = [];
  parts.push(
    `<svg class="eval-radar" viewBox="0 0 ${size} ${size}" width="${size}" height="${size}" xmlns="http://www.w3.org/2000/svg">`,
  );
  for (const ring of geom.rings) {
    const pairs: string[] = [];
    for (let i = 0; i < ring.length; i += 2) pairs.push(`${round2(ring[i]!)},${round2(ring[i + 1]!)}`);
    parts.push(`<polygon class="radar-ring" points="${pairs.join(' ')}" fill="none" stroke="#d5d5d5"/>`);
  }
  for (const axis of geom.axes) {
    parts.push(
      `<line class="radar-axis" x1="${geom.center}" y1="${geom.center}" ` +
        `x2="${round2(axis.endX)}" y2="${round2(axis.endY)}" stroke="#bbbbbb"/>`,
    );
  }
  parts.push(
    `<polygon class="radar-score" points="${polygonPath(geom.points)}" ` +
      `fill="rgba(74,124,197,0.25)" stroke="#4a7cc5" stroke-width="2"/>`,
  );
  for (const point of geom.points) {
    const low = geom.weakest.includes(point.dimension);
    parts.push(
      `<circle class="radar-point${low ? ' radar-point-low' : ''}" data-dimension="${escapeXml(point.dimension)}" ` +
        `cx="${round2(point.x)}" cy="${round2(point.y)}" r="${low ? 5 : 3}" ` +
        `fill="${low ? '#c54a4a' : '#4a7cc5'}"/>`,
    );
  }
  for (const axis of geom.axes) {
    const anchor = Math.abs(Math.cos(axis.angle)) < 0.01 ? 'middle' : axis.endX > geom.center ? 'start' : 'end';
    parts.push(
      `<text class="radar-label" x="${round2(axis.labelX)}" y="${round2(axis.labelY)}" ` +
        `text-anchor="${anchor}" font-size="10">${escapeXml(axis.dimension)}</text>`,
    );
  }
  parts.push('</svg>');
  return parts.join('');
}

function clamp(value: number): number {
  if (Number.isNaN(value)) return SCORE_MIN;
  return Math.min(SCORE_MAX, Math.max(SCORE_MIN, value));
}

function round2(value: number): number {
  return Math.round(value * 100) / 100;
}

function escapeXml(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;').replace(/"/g, '&quot;');
}
