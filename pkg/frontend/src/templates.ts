import type { EntityTemplate, EventTemplate } from './gestures.js';

// Starter templates for the drag tray. Dropping one creates the unit with
// these values; the edit panel takes over from there.

export const ENTITY_TEMPLATES: readonly EntityTemplate[] = [
  { name: 'New character', identity: 'role to fill in', motivation: '', traits: ['trait to fill in'] },
  { name: 'Protagonist', identity: 'lead of the story', motivation: 'reach the goal', traits: ['determined'] },
  { name: 'Companion', identity: 'ally of the lead', motivation: 'help a friend', traits: ['loyal'] },
];

export const EVENT_TEMPLATES: readonly EventTemplate[] = [
  { time: 'sometime', location: 'somewhere', details: 'Something happens.', importance: 'medium' },
  { time: 'at the start', location: 'opening scene', details: 'The trouble begins.', importance: 'high' },
  { time: 'at the end', location: 'closing scene', details: 'Things settle.', importance: 'medium' },
];
