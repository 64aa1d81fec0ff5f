import type { CanvasState } from './state.js';
import { renderRadarSvg } from './radar.js';
import type { EvaluationReport, ExportBundle, ValidationState } from './types.js';

// The non-canvas panels: textual story view, evaluation detail view with the
// radar and suggestion, validation list, inline element errors, busy prompt,
// and export links. Deliberately thin; every fact shown comes straight off
// the server payloads.

export interface ExportFile {
  name: string;
  mimeType: string;
  content: string;
}

export class StudioView {
  private readonly doc: Document;

  constructor(private readonly root: HTMLElement) {
    this.doc = root.ownerDocument;
    for (const cls of ['story-view', 'detail-view', 'validation-view', 'error-view', 'export-view']) {
      const panel = this.doc.createElement('section');
      panel.className = cls;
      root.appendChild(panel);
    }
  }

  private panel(cls: string): HTMLElement {
    return this.root.querySelector(`.${cls}`) as HTMLElement;
  }

  renderStory(text: string): void {
    const panel = this.panel('story-view');
    panel.textContent = '';
    const body = this.doc.createElement('pre');
    body.className = 'story-text';
    body.textContent = text;
    panel.appendChild(body);
  }

  renderReport(report: EvaluationReport | null): void {
    const panel = this.panel('detail-view');
    panel.textContent = '';
    if (!report) {
      const note = this.doc.createElement('p');
      note.className = 'no-report';
      note.textContent = 'No evaluation yet.';
      panel.appendChild(note);
      return;
    }
    const chart = this.doc.createElement('div');
    chart.className = 'radar-holder';
    chart.innerHTML = renderRadarSvg(report.dimensions);
    panel.appendChild(chart);

    const lowest = Math.min(...Object.values(report.dimensions));
    const list = this.doc.createElement('ul');
    list.className = 'dimension-list';
    for (const [dimension, value] of Object.entries(report.dimensions)) {
      const item = this.doc.createElement('li');
      item.dataset['dimension'] = dimension;
      item.className = value === lowest ? 'dimension dimension-low' : 'dimension';
      item.textContent = `${dimension}: ${value.toFixed(2)}`;
      list.appendChild(item);
    }
    panel.appendChild(list);

    const suggestion = this.doc.createElement('blockquote');
    suggestion.className = 'suggestion';
    suggestion.textContent = report.suggestion;
    panel.appendChild(suggestion);
  }

  renderValidation(validation: ValidationState): void {
    const panel = this.panel('validation-view');
    panel.textContent = '';
    const badge = this.doc.createElement('span');
    badge.className = validation.ok ? 'validation-ok' : 'validation-bad';
    badge.textContent = validation.ok ? 'frame is valid' : `${validation.violations.length} problem(s)`;
    panel.appendChild(badge);
    if (!validation.ok) {
      const list = this.doc.createElement('ul');
      for (const violation of validation.violations) {
        const item = this.doc.createElement('li');
        item.dataset['code'] = violation.code;
        item.textContent = `${violation.code}: ${violation.message}`;
        list.appendChild(item);
      }
      panel.appendChild(list);
    }
  }

  // One badge per element the server complained about, addressable by the
  // element key so the canvas can place it next to the offender.
  renderInlineErrors(state: CanvasState): void {
    const panel = this.panel('error-view');
    panel.textContent = '';
    for (const [key, error] of state.errors) {
      const badge = this.doc.createElement('div');
      badge.className = 'inline-error';
      badge.dataset['element'] = key;
      badge.dataset['errorType'] = error.type;
      badge.textContent = `${error.type}: ${error.detail}`;
      panel.appendChild(badge);
    }
    if (state.busy) {
      const prompt = this.doc.createElement('div');
      prompt.className = 'busy-prompt';
      prompt.textContent = 'Someone else is editing this frame. Reload to pick up their changes.';
      panel.appendChild(prompt);
    }
  }

  renderExport(bundle: ExportBundle): ExportFile[] {
    const files: ExportFile[] = [
      { name: `${bundle.frame_id}_story.txt`, mimeType: 'text/plain', content: bundle.story },
      { name: `${bundle.frame_id}_frame.json`, mimeType: 'application/json', content: bundle.frame_json },
      {
        name: `${bundle.frame_id}_diagram.json`,
        mimeType: 'application/json',
        content: JSON.stringify(bundle.diagram, null, 2),
      },
    ];
    const panel = this.panel('export-view');
    panel.textContent = '';
    for (const file of files) {
      const link = this.doc.createElement('a');
      link.className = 'export-link';
      link.download = file.name;
      link.href = `data:${file.mimeType};charset=utf-8,${encodeURIComponent(file.content)}`;
      link.textContent = file.name;
      panel.appendChild(link);
    }
    return files;
  }
}
