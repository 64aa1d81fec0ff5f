export { ApiClient, ApiError } from './api.js';
export type { FetchLike, TranscriptTail } from './api.js';
export { CanvasController } from './gestures.js';
export type { EntityTemplate, EventTemplate, FrameApi, GestureOutcome, RelationshipAttrs } from './gestures.js';
export { CanvasState } from './state.js';
export type { BoxState, ChainArrow, ChipState, EdgeState, InlineError, Point, Topology } from './state.js';
export { radarGeometry, polygonPath, renderRadarSvg, SCORE_MAX, SCORE_MIN } from './radar.js';
export type { RadarAxis, RadarGeometry, RadarPoint } from './radar.js';
export { ENTITY_TEMPLATES, EVENT_TEMPLATES } from './templates.js';
export { StudioView } from './view.js';
export type { ExportFile } from './view.js';
export * from './types.js';
