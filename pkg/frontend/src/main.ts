/** Page bootstrap: bind DOM events to controller actions, render snapshots. */

import { ApiClient } from './api.js';
import { AppController } from './app.js';
import {
  EPSILON_MAX,
  EPSILON_MIN,
  EPSILON_STEP,
  WALKTHROUGH_SECTIONS,
  advanceWalkthrough,
  rewindWalkthrough,
  setDashboardPlot,
  setView,
  toggleSeBands,
  visibleSections,
} from './state.js';
import {
  attributeRows,
  boxplotView,
  effectivenessScatterView,
  effectivenessView,
  goodnessView,
  occupancyRows,
  performanceScatterView,
  renderAttributesTableHtml,
  renderBarsSvg,
  renderBoxplotSvg,
  renderCurvesSvg,
  renderEffectivenessScatterSvg,
  renderOccupancyTableHtml,
  renderScatterSvg,
  renderSplinesSvg,
  splinesView,
  strengthsWeaknessesView,
} from './views.js';

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get('api') ?? 'http://127.0.0.1:8000');
const app = new AppController(api, () => render());

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

// ---------------------------------------------------------------------------
// rendering

function renderDatasetSelect(): void {
  const select = el<HTMLSelectElement>('dataset-select');
  const options = app.datasets
    .map(
      (d) =>
        `<option value="${d.id}"${d.id === app.state.datasetId ? ' selected' : ''}>${d.name} (${d.n_instances}×${d.n_algorithms}, ${d.source})</option>`,
    )
    .join('');
  select.innerHTML = `<option value="">— choose a dataset —</option>${options}`;
}

function renderBanner(): void {
  const banner = el('banner');
  if (app.state.error) {
    banner.className = 'banner error';
    banner.textContent = app.state.error;
  } else if (app.state.notice) {
    banner.className = 'banner notice';
    banner.textContent = app.state.notice;
  } else {
    banner.className = 'banner hidden';
    banner.textContent = '';
  }
}

function renderSelectedBoxplots(): string {
  const payload = app.payload;
  if (!payload || !app.state.selectedAlgorithm) {
    return '<p class="hint">No algorithm selected.</p>';
  }
  const consistency = renderBoxplotSvg(
    boxplotView(payload, 'consistency', app.state.selectedAlgorithm),
  );
  const difficulty = renderBoxplotSvg(
    boxplotView(payload, 'difficulty_limit', app.state.selectedAlgorithm),
  );
  return `<h3>Consistency</h3>${consistency}<h3>Difficulty limit</h3>${difficulty}`;
}

function algorithmOptions(): string {
  const payload = app.payload;
  if (!payload) return '';
  const none = `<option value=""${app.state.selectedAlgorithm ? '' : ' selected'}>none</option>`;
  return (
    none +
    payload.dataset.algorithms
      .map(
        (name) =>
          `<option value="${name}"${name === app.state.selectedAlgorithm ? ' selected' : ''}>${name}</option>`,
      )
      .join('')
  );
}

function epsilonControlHtml(): string {
  return `epsilon <input type="range" id="epsilon-slider" min="${EPSILON_MIN}" max="${EPSILON_MAX}" step="${EPSILON_STEP}" value="${app.state.epsilon}"/>
    <span id="epsilon-value">${app.state.epsilon.toFixed(2)}</span>`;
}

function sectionHtml(section: string): string {
  const payload = app.payload;
  if (!payload) return '';
  switch (section) {
    case 'data':
      return `
        <h2>1 · Data</h2>
        <p>${payload.dataset.name}: ${payload.dataset.n_instances} instances ×
        ${payload.dataset.n_algorithms} algorithms. Model ${
          payload.parameters.converged ? 'converged' : 'did not converge'
        } after ${payload.parameters.iterations} updates. Each instance receives a
        latent easiness score; its negation is the instance difficulty shown on
        every horizontal axis below.</p>`;
    case 'attributes':
      return `
        <h2>2 · Algorithm attributes</h2>
        <p>Anomalous algorithms do better the harder an instance is; consistency
        is the reciprocal absolute discrimination; the difficulty limit is the
        hardest difficulty at which expected performance still clears one half.
        Select a row to place that algorithm among the portfolio.</p>
        <div id="attributes-table">${renderAttributesTableHtml(attributeRows(payload), app.state.selectedAlgorithm)}</div>
        <div id="boxplots">${renderSelectedBoxplots()}</div>`;
    case 'splines':
      return `
        <h2>3 · Performance across the difficulty spectrum</h2>
        <p>Smoothing splines of performance against difficulty; the strongest
        algorithm at a difficulty is the one on top.</p>
        <label>highlight <select id="algo-select">${algorithmOptions()}</select></label>
        <label><input type="checkbox" id="se-toggle" ${app.state.showSeBands ? 'checked' : ''}/> standard-error bands</label>
        <div id="splines-chart">${renderSplinesSvg(splinesView(payload, app.state.selectedAlgorithm, app.state.showSeBands))}</div>`;
    case 'strengths-weaknesses':
      return `
        <h2>4 · Strengths and weaknesses</h2>
        <p>At every difficulty, algorithms within epsilon of the best (worst)
        fitted performance count as strong (weak). The occupancy table updates
        together with the slider.</p>
        <label>${epsilonControlHtml()}</label>
        <div id="sw-chart">${renderBarsSvg(strengthsWeaknessesView(payload))}</div>
        <h3>Spectrum occupancy</h3>
        <div id="occupancy-table">${renderOccupancyTableHtml(occupancyRows(payload))}</div>`;
    case 'diagnostics':
      return `
        <h2>5 · Model diagnostics</h2>
        <p>Residual distributions per algorithm, and predicted against actual
        effectiveness: points near the dotted diagonal indicate a good fit.</p>
        <div id="goodness-chart">${renderCurvesSvg(goodnessView(payload))}</div>
        <div id="effectiveness-scatter">${renderEffectivenessScatterSvg(effectivenessScatterView(payload))}</div>`;
    default:
      return '';
  }
}

function dashboardPlotOptions(): string {
  const payload = app.payload;
  if (!payload) return '';
  const kinds: [string, string][] = [
    ['1', 'performance scatter'],
    ['2', 'per-algorithm scatter (server)'],
    ['3', 'splines'],
    ['4', 'strengths & weaknesses'],
    ['goodness', 'model goodness'],
    ['effectiveness1', 'actual effectiveness'],
    ['effectiveness2', 'predicted effectiveness'],
    ['effectiveness3', 'predicted vs actual'],
    ...payload.dataset.algorithms.map(
      (n): [string, string] => [`heatmap-${n}`, `heatmap: ${n}`],
    ),
  ];
  return kinds
    .map(
      ([value, label]) =>
        `<option value="${value}"${value === app.state.dashboardPlot ? ' selected' : ''}>${label}</option>`,
    )
    .join('');
}

function dashboardPlotHtml(): string {
  const payload = app.payload;
  if (!payload || !app.state.datasetId) return '';
  switch (app.state.dashboardPlot) {
    case '1':
      return renderScatterSvg(performanceScatterView(payload));
    case '3':
      return renderSplinesSvg(
        splinesView(payload, app.state.selectedAlgorithm, app.state.showSeBands),
      );
    case '4':
      return (
        renderBarsSvg(strengthsWeaknessesView(payload)) +
        '<h3>Spectrum occupancy</h3>' +
        renderOccupancyTableHtml(occupancyRows(payload))
      );
    case 'goodness':
      return renderCurvesSvg(goodnessView(payload));
    case 'effectiveness1':
      return renderCurvesSvg(effectivenessView(payload, 'actual'));
    case 'effectiveness2':
      return renderCurvesSvg(effectivenessView(payload, 'predicted'));
    case 'effectiveness3':
      return renderEffectivenessScatterSvg(effectivenessScatterView(payload));
    default:
      // faceted scatter and heatmaps come from the server renderer
      return `<img class="server-plot" src="${app.api.plotUrl(app.state.datasetId, app.state.dashboardPlot, app.state.epsilon)}" alt="${app.state.dashboardPlot}"/>`;
  }
}

function render(): void {
  renderBanner();
  renderDatasetSelect();
  el('compute-btn').toggleAttribute('disabled', app.state.computing);
  el('view-walkthrough').className = app.state.view === 'walkthrough' ? 'tab active' : 'tab';
  el('view-dashboard').className = app.state.view === 'dashboard' ? 'tab active' : 'tab';

  const content = el('content');
  if (!app.payload) {
    content.innerHTML = '<p class="hint">Choose a dataset and press Compute.</p>';
    return;
  }
  if (app.state.view === 'walkthrough') {
    const sections = visibleSections(app.state)
      .map((s) => `<section data-section="${s}">${sectionHtml(s)}</section>`)
      .join('');
    const canContinue = app.state.progress < WALKTHROUGH_SECTIONS.length;
    content.innerHTML = `${sections}
      <div class="walk-controls">
        <button id="back-btn" ${app.state.progress <= 1 ? 'disabled' : ''}>Back</button>
        <button id="continue-btn" ${canContinue ? '' : 'disabled'}>Continue</button>
      </div>`;
  } else {
    content.innerHTML = `
      <label>plot <select id="plot-select">${dashboardPlotOptions()}</select></label>
      <label>highlight <select id="algo-select">${algorithmOptions()}</select></label>
      <label>${epsilonControlHtml()}</label>
      <div id="dashboard-plot">${dashboardPlotHtml()}</div>`;
  }
  wireContentEvents();
}

// ---------------------------------------------------------------------------
// event wiring

function wireContentEvents(): void {
  document.getElementById('continue-btn')?.addEventListener('click', () => {
    app.state = advanceWalkthrough(app.state);
    render();
  });
  document.getElementById('back-btn')?.addEventListener('click', () => {
    app.state = rewindWalkthrough(app.state);
    render();
  });
  document.getElementById('plot-select')?.addEventListener('change', (event) => {
    app.state = setDashboardPlot(app.state, (event.target as HTMLSelectElement).value);
    render();
  });
  document.getElementById('algo-select')?.addEventListener('change', (event) => {
    app.highlight((event.target as HTMLSelectElement).value || null);
  });
  document.getElementById('se-toggle')?.addEventListener('change', () => {
    app.state = toggleSeBands(app.state);
    render();
  });
  document.getElementById('epsilon-slider')?.addEventListener('input', (event) => {
    void app.changeEpsilon(Number((event.target as HTMLInputElement).value));
  });
  document.querySelectorAll('#attributes-table tr[data-algorithm]').forEach((row) => {
    row.addEventListener('click', () => {
      app.highlight((row as HTMLElement).dataset.algorithm ?? null);
    });
  });
}

function wireStaticEvents(): void {
  el<HTMLSelectElement>('dataset-select').addEventListener('change', (event) => {
    app.chooseDataset((event.target as HTMLSelectElement).value || null);
  });
  el<HTMLInputElement>('upload-input').addEventListener('change', async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (file) {
      await app.uploadDataset(file, file.name.replace(/\.csv$/i, ''));
      input.value = '';
    }
  });
  el<HTMLInputElement>('scale-toggle').addEventListener('change', (event) => {
    app.configureTransform({ scale: (event.target as HTMLInputElement).checked });
  });
  el<HTMLInputElement>('invert-toggle').addEventListener('change', (event) => {
    app.configureTransform({ invert: (event.target as HTMLInputElement).checked });
  });
  el<HTMLSelectElement>('scale-by-select').addEventListener('change', (event) => {
    app.configureTransform({
      scale_by: (event.target as HTMLSelectElement).value as 'column' | 'global',
    });
  });
  el('compute-btn').addEventListener('click', () => void app.compute());
  el('download-btn').addEventListener('click', () =>
    void app.download((blob, filename) => {
      const link = document.createElement('a');
      link.href = URL.createObjectURL(blob);
      link.download = filename;
      link.click();
      URL.revokeObjectURL(link.href);
    }),
  );
  el('view-walkthrough').addEventListener('click', () => {
    app.state = setView(app.state, 'walkthrough');
    render();
  });
  el('view-dashboard').addEventListener('click', () => {
    app.state = setView(app.state, 'dashboard');
    render();
  });
}

async function start(): Promise<void> {
  wireStaticEvents();
  render();
  try {
    await app.init();
  } catch (error) {
    el('banner').className = 'banner error';
    el('banner').textContent = `cannot reach the analysis server: ${String(error)}`;
  }
}

void start();
