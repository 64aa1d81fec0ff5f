import { ApiError } from './api.js';
import type { CanvasState, Point } from './state.js';
import type { BuilderOp, Direction, FrameSession, Importance, PatchResponse, Stage, Strength } from './types.js';

// The slice of the API the canvas needs; ApiClient satisfies it.
export interface FrameApi {
  patch(frameId: string, ops: BuilderOp[]): Promise<PatchResponse>;
  getFrame(frameId: string): Promise<FrameSession>;
}

export interface EntityTemplate {
  name: string;
  identity: string;
  motivation?: string;
  traits: string[];
}

export interface EventTemplate {
  time: string;
  location: string;
  details: string;
  importance?: Importance;
}

export interface RelationshipAttrs {
  emotionalType: string;
  actionType: string;
  strength?: Strength;
  evolution?: string;
  eventId: string;
}

export interface GestureOutcome {
  ok: boolean;
  // id created by the gesture, when the op returns one
  createdId?: string;
  error?: ApiError;
}

// Translates canvas gestures into builder ops and keeps the local mirror in
// sync. All validation authority is server-side: the mirror only changes
// after a 2xx PATCH, so a rejected gesture (a cycle link, a bad enum) never
// draws anything; the server's complaint lands on the element instead.
export class CanvasController {
  constructor(
    private readonly api: FrameApi,
    readonly state: CanvasState,
    readonly frameId: string,
  ) {}

  async dropEntityTemplate(template: EntityTemplate, at: Point): Promise<GestureOutcome> {
    const outcome = await this.apply('tray:entity', {
      op: 'create_entity',
      args: {
        name: template.name,
        identity: template.identity,
        motivation: template.motivation ?? '',
        traits: [...template.traits],
      },
    });
    if (outcome.ok && outcome.createdId) {
      this.state.chips.set(outcome.createdId, {
        entityId: outcome.createdId,
        name: template.name,
        identity: template.identity,
      });
      this.state.place(outcome.createdId, at);
    }
    return outcome;
  }

  async dropEventTemplate(template: EventTemplate, at: Point): Promise<GestureOutcome> {
    const outcome = await this.apply('tray:event', {
      op: 'create_event',
      args: {
        time: template.time,
        location: template.location,
        details: template.details,
        importance: template.importance ?? 'medium',
      },
    });
    if (outcome.ok && outcome.createdId) {
      this.state.boxes.set(outcome.createdId, {
        eventId: outcome.createdId,
        details: template.details,
        time: template.time,
        location: template.location,
        importance: template.importance ?? 'medium',
        stage: null,
      });
      this.state.place(outcome.createdId, at);
    }
    return outcome;
  }

  // Dragging an existing event box is a placement gesture; the server only
  // acknowledges the id, the position stays client-side.
  async placeEvent(eventId: string, at: Point): Promise<GestureOutcome> {
    const outcome = await this.apply(eventId, { op: 'drop_event', args: { event_id: eventId } });
    if (outcome.ok) this.state.place(eventId, at);
    return outcome;
  }

  async attachChip(entityId: string, eventId: string): Promise<GestureOutcome> {
    const outcome = await this.apply(entityId, {
      op: 'attach_entity',
      args: { entity_id: entityId, event_id: eventId },
    });
    if (outcome.ok) this.state.markAttached(entityId, eventId);
    return outcome;
  }

  async detachChip(entityId: string, eventId: string): Promise<GestureOutcome> {
    const outcome = await this.apply(entityId, {
      op: 'detach_entity',
      args: { entity_id: entityId, event_id: eventId },
    });
    // detaching can strip or collapse relationships server-side; resync
    if (outcome.ok) await this.refresh();
    return outcome;
  }

  // Connecting chips draws a relationship edge at an event.
  async connectChips(sources: string[], targets: string[], attrs: RelationshipAttrs): Promise<GestureOutcome> {
    const key = `connect:${sources.join('+')}:${targets.join('+')}`;
    const outcome = await this.apply(key, {
      op: 'connect_relationship',
      args: {
        sources: [...sources],
        targets: [...targets],
        emotional_type: attrs.emotionalType,
        action_type: attrs.actionType,
        strength: attrs.strength ?? 'medium',
        evolution: attrs.evolution ?? '',
        event_id: attrs.eventId,
      },
    });
    if (outcome.ok && outcome.createdId) {
      const single = sources.length === 1 && targets.length === 1 && sources[0] === targets[0];
      this.state.edges.set(outcome.createdId, {
        relationshipId: outcome.createdId,
        sources: [...sources],
        targets: [...targets],
        direction: (single ? 'self' : 'unidirectional') as Direction,
        emotion: attrs.emotionalType,
        action: attrs.actionType,
        strength: attrs.strength ?? 'medium',
        eventId: attrs.eventId,
      });
    }
    return outcome;
  }

  // The "is bidirectional" switch on a relationship edge.
  async toggleBidirectional(relationshipId: string, on: boolean): Promise<GestureOutcome> {
    const outcome = await this.apply(relationshipId, {
      op: 'set_bidirectional',
      args: { relationship_id: relationshipId, bidirectional: on },
    });
    if (outcome.ok) await this.refresh();
    return outcome;
  }

  // Connecting two event boxes draws a chain arrow. A rejected link (cycle,
  // branch) is never drawn; the error renders on the attempted arrow.
  async connectBoxes(earlier: string, later: string): Promise<GestureOutcome> {
    const outcome = await this.apply(`chain:${earlier}:${later}`, {
      op: 'link_events',
      args: { earlier, later },
    });
    if (outcome.ok) this.state.chain.push({ from: earlier, to: later });
    return outcome;
  }

  async disconnectBoxes(earlier: string, later: string): Promise<GestureOutcome> {
    const outcome = await this.apply(`chain:${earlier}:${later}`, {
      op: 'unlink_events',
      args: { earlier, later },
    });
    if (outcome.ok) {
      this.state.chain = this.state.chain.filter((a) => !(a.from === earlier && a.to === later));
    }
    return outcome;
  }

  async assignStage(eventId: string, stage: Stage): Promise<GestureOutcome> {
    const outcome = await this.apply(eventId, {
      op: 'assign_stage',
      args: { event_id: eventId, stage },
    });
    if (outcome.ok) {
      const box = this.state.boxes.get(eventId);
      if (box) box.stage = stage;
    }
    return outcome;
  }

  // The "Save Attributes" button on the edit panel; kind decides which unit
  // the edits go to.
  async saveAttributes(
    kind: 'entity' | 'event' | 'relationship',
    id: string,
    attrs: Record<string, unknown>,
  ): Promise<GestureOutcome> {
    const opByKind = { entity: 'edit_entity', event: 'edit_event', relationship: 'edit_relationship' } as const;
    const idArgByKind = { entity: 'entity_id', event: 'event_id', relationship: 'relationship_id' } as const;
    const outcome = await this.apply(id, {
      op: opByKind[kind],
      args: { [idArgByKind[kind]]: id, ...attrs },
    });
    if (outcome.ok) await this.refresh();
    return outcome;
  }

  async setOutline(title: string, description: string): Promise<GestureOutcome> {
    const outcome = await this.apply('outline', {
      op: 'set_outline',
      args: { title, description },
    });
    if (outcome.ok) {
      this.state.outlineTitle = title;
      this.state.outlineDescription = description;
    }
    return outcome;
  }

  async removeElement(kind: 'entity' | 'event' | 'relationship', id: string): Promise<GestureOutcome> {
    const opByKind = { entity: 'remove_entity', event: 'remove_event', relationship: 'remove_relationship' } as const;
    const idArgByKind = { entity: 'entity_id', event: 'event_id', relationship: 'relationship_id' } as const;
    const outcome = await this.apply(id, { op: opByKind[kind], args: { [idArgByKind[kind]]: id } });
    if (outcome.ok) await this.refresh();
    return outcome;
  }

  // Pull the server's state and rebuild the canvas from it (page reload,
  // or after an op with cascading effects the mirror does not model).
  async refresh(): Promise<void> {
    const session = await this.api.getFrame(this.frameId);
    this.state.rehydrate(session.frame, session.validation);
  }

  private async apply(elementKey: string, op: BuilderOp): Promise<GestureOutcome> {
    try {
      const response = await this.api.patch(this.frameId, [op]);
      this.state.validation = response.validation;
      this.state.clearError(elementKey);
      this.state.busy = false;
      const result = response.results[0]?.result;
      return { ok: true, createdId: typeof result === 'string' ? result : undefined };
    } catch (error) {
      if (!(error instanceof ApiError)) throw error;
      if (error.isBusy) {
        // someone else is editing this frame: prompt a reload, draw nothing
        this.state.busy = true;
      } else {
        this.state.setError(elementKey, {
          type: error.type,
          detail: error.detail,
          violations: error.violations,
        });
      }
      return { ok: false, error };
    }
  }
}
