import type { Direction, FrameDoc, Stage, ValidationState, Violation } from './types.js';
import { STAGES } from './types.js';

export interface Point {
  x: number;
  y: number;
}

export interface ChipState {
  entityId: string;
  name: string;
  identity: string;
}

export interface BoxState {
  eventId: string;
  details: string;
  time: string;
  location: string;
  importance: string;
  stage: Stage | null;
}

export interface EdgeState {
  relationshipId: string;
  sources: string[];
  targets: string[];
  direction: Direction;
  emotion: string;
  action: string;
  strength: string;
  eventId: string | null;
}

export interface ChainArrow {
  from: string;
  to: string;
}

export interface InlineError {
  type: string;
  detail: string;
  violations: Violation[];
}

// Deterministic shape of everything drawn on the canvas; used to check that
// rehydrating from the server reproduces the same picture.
export interface Topology {
  chips: string[];
  boxes: Array<{ id: string; stage: Stage | null }>;
  attachments: Record<string, string[]>;
  chain: ChainArrow[];
  edges: Array<{ id: string; sources: string[]; targets: string[]; direction: Direction; event: string | null }>;
  outline: { title: string; stages: Record<Stage, string[]> };
}

export class CanvasState {
  chips = new Map<string, ChipState>();
  boxes = new Map<string, BoxState>();
  edges = new Map<string, EdgeState>();
  attachments = new Map<string, Set<string>>();
  chain: ChainArrow[] = [];
  outlineTitle = '';
  outlineDescription = '';
  positions = new Map<string, Point>();
  selection: string | null = null;
  validation: ValidationState = { ok: false, violations: [] };
  // element key ("entity_1", "relationship_2", "chain:event_1:event_2", ...)
  // -> the server complaint to render next to it
  errors = new Map<string, InlineError>();
  busy = false;

  place(id: string, at: Point): void {
    this.positions.set(id, { ...at });
  }

  attachedTo(eventId: string): string[] {
    return [...(this.attachments.get(eventId) ?? [])].sort(byIdNumber);
  }

  setError(key: string, error: InlineError): void {
    this.errors.set(key, error);
  }

  clearError(key: string): void {
    this.errors.delete(key);
  }

  // Rebuild canvas structure from the served frame document. The server does
  // not expose its attachment table, so attachments are inferred from
  // relationship membership: every member of a relationship is attached at
  // that relationship's event. Chips attached by gesture but not used in any
  // relationship return to the tray after a reload.
  rehydrate(frame: FrameDoc, validation?: ValidationState): void {
    this.chips.clear();
    this.boxes.clear();
    this.edges.clear();
    this.attachments.clear();
    this.chain = [];
    this.errors.clear();

    for (const ent of frame.entities) {
      this.chips.set(ent.entity_id, {
        entityId: ent.entity_id,
        name: ent.entity_name,
        identity: ent.entity_identity,
      });
    }
    for (const ev of frame.events) {
      this.boxes.set(ev.event_id, {
        eventId: ev.event_id,
        details: ev.event_details,
        time: ev.event_time,
        location: ev.event_location,
        importance: ev.event_importance,
        stage: stageOf(frame, ev.event_id),
      });
      if (ev.later_event) this.chain.push({ from: ev.event_id, to: ev.later_event });
    }
    for (const rel of frame.relationships) {
      this.edges.set(rel.relationship_id, {
        relationshipId: rel.relationship_id,
        sources: [...rel.source_entities],
        targets: [...rel.target_entities],
        direction: rel.action_direction,
        emotion: rel.emotional_type,
        action: rel.action_type,
        strength: rel.relationship_strength,
        eventId: rel.event_id,
      });
      if (rel.event_id) {
        for (const member of rel.included_entities) this.markAttached(member, rel.event_id);
      }
    }
    this.outlineTitle = frame.outline.title;
    this.outlineDescription = frame.outline.story_description;
    if (validation) this.validation = validation;

    // drop positions for elements that no longer exist
    for (const id of [...this.positions.keys()]) {
      if (!this.chips.has(id) && !this.boxes.has(id)) this.positions.delete(id);
    }
  }

  markAttached(entityId: string, eventId: string): void {
    let members = this.attachments.get(eventId);
    if (!members) {
      members = new Set();
      this.attachments.set(eventId, members);
    }
    members.add(entityId);
  }

  markDetached(entityId: string, eventId: string): void {
    this.attachments.get(eventId)?.delete(entityId);
  }

  topology(): Topology {
    const attachments: Record<string, string[]> = {};
    for (const [eventId, members] of this.attachments) {
      if (members.size) attachments[eventId] = [...members].sort(byIdNumber);
    }
    const stages = { beginning: [], middle: [], climax: [], ending: [] } as Record<Stage, string[]>;
    for (const box of this.boxes.values()) {
      if (box.stage) stages[box.stage].push(box.eventId);
    }
    for (const stage of STAGES) stages[stage].sort(byChainOrder(this.chain));
    return {
      chips: [...this.chips.keys()].sort(byIdNumber),
      boxes: [...this.boxes.values()]
        .map((b) => ({ id: b.eventId, stage: b.stage }))
        .sort((a, b) => byIdNumber(a.id, b.id)),
      attachments,
      chain: [...this.chain].sort((a, b) => byIdNumber(a.from, b.from)),
      edges: [...this.edges.values()]
        .map((e) => ({
          id: e.relationshipId,
          sources: [...e.sources],
          targets: [...e.targets],
          direction: e.direction,
          event: e.eventId,
        }))
        .sort((a, b) => byIdNumber(a.id, b.id)),
      outline: { title: this.outlineTitle, stages },
    };
  }
}

function stageOf(frame: FrameDoc, eventId: string): Stage | null {
  for (const stage of STAGES) {
    if ((frame.outline.story_structure[stage] ?? []).includes(eventId)) return stage;
  }
  return null;
}

function byIdNumber(a: string, b: string): number {
  const na = Number(a.split('_').pop());
  const nb = Number(b.split('_').pop());
  if (Number.isNaN(na) || Number.isNaN(nb)) return a < b ? -1 : a > b ? 1 : 0;
  return na - nb;
}

function byChainOrder(chain: ChainArrow[]): (a: string, b: string) => number {
  const next = new Map(chain.map((arrow) => [arrow.from, arrow.to]));
  const seen = new Set(chain.map((arrow) => arrow.to));
  const order = new Map<string, number>();
  let index = 0;
  for (const start of next.keys()) {
    if (seen.has(start)) continue;
    let cursor: string | undefined = start;
    while (cursor !== undefined && !order.has(cursor)) {
      order.set(cursor, index++);
      cursor = next.get(cursor);
    }
  }
  return (a, b) => {
    const oa = order.get(a);
    const ob = order.get(b);
    if (oa !== undefined && ob !== undefined) return oa - ob;
    if (oa !== undefined) return -1;
    if (ob !== undefined) return 1;
    return byIdNumber(a, b);
  };
}
