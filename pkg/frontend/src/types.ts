// Wire types for the storyframe HTTP service. Field names match the
// server's canonical JSON exactly; do not rename.

export type Importance = 'low' | 'medium' | 'high';
export type Strength = 'low' | 'medium' | 'high';
export type Direction = 'self' | 'unidirectional' | 'bidirectional';
export type Stage = 'beginning' | 'middle' | 'climax' | 'ending';

export const STAGES: readonly Stage[] = ['beginning', 'middle', 'climax', 'ending'];

export interface EntityDoc {
  entity_id: string;
  entity_name: string;
  entity_identity: string;
  entity_motivation: string;
  personality_traits: string[];
}

export interface EventDoc {
  event_id: string;
  event_time: string;
  event_location: string;
  event_details: string;
  event_importance: Importance;
  earlier_event: string | null;
  later_event: string | null;
}

export interface RelationshipDoc {
  relationship_id: string;
  included_entities: string[];
  source_entities: string[];
  target_entities: string[];
  emotional_type: string;
  action_type: string;
  action_direction: Direction;
  relationship_strength: Strength;
  relationship_evolution: string;
  event_id: string | null;
}

export interface OutlineDoc {
  title: string;
  story_description: string;
  story_structure: Record<Stage, string[]>;
}

export interface FrameDoc {
  entities: EntityDoc[];
  events: EventDoc[];
  relationships: RelationshipDoc[];
  outline: OutlineDoc;
}

export interface Violation {
  code: string;
  message: string;
  subjects: string[];
}

export interface ValidationState {
  ok: boolean;
  violations: Violation[];
}

export interface BuilderOp {
  op: string;
  args: Record<string, unknown>;
}

export interface OpResult {
  op: string;
  result: unknown;
}

export interface EvaluationReport {
  dimensions: Record<string, number>;
  raw_runs: Record<string, number[]>;
  n_runs: number;
  suggestion: string;
}

export interface StoredStory {
  text: string;
  created_by: string;
}

export interface FrameSession {
  frame_id: string;
  frame: FrameDoc;
  validation: ValidationState;
  stories: StoredStory[];
  reports: (EvaluationReport | null)[];
}

export interface PatchResponse {
  frame_id: string;
  results: OpResult[];
  validation: ValidationState;
}

export interface ProduceResponse {
  frame_id: string;
  version: number;
  story: string;
  report: EvaluationReport | null;
  evaluated: boolean;
}

export interface EvaluateResponse {
  frame_id: string;
  version: number;
  report: EvaluationReport;
}

export interface DiagramNode {
  id: string;
  kind: 'entity';
  label: string;
  sublabel: string;
}

export interface DiagramBox {
  id: string;
  kind: 'event';
  label: string;
  time: string;
  location: string;
  importance: Importance;
  stage: Stage | null;
}

export interface DiagramEdge {
  id: string;
  kind: 'relationship' | 'sequence';
  sources: string[];
  targets: string[];
  direction: Direction;
  label?: string;
  emotion?: string;
  strength?: Strength;
  event?: string | null;
}

export interface DiagramLane {
  stage: Stage;
  events: string[];
}

export interface DiagramDoc {
  title: string;
  nodes: DiagramNode[];
  boxes: DiagramBox[];
  edges: DiagramEdge[];
  lanes: DiagramLane[];
}

export interface ExportBundle {
  frame_id: string;
  story: string;
  frame_json: string;
  diagram: DiagramDoc;
  report: EvaluationReport | null;
}
