// Browser bootstrap: wires the canvas, the toolbar and the service client
// together.  All geometry shown comes from the engine's state views; this
// file only routes DOM events to the session endpoints and re-renders.

import { ApiError, SessionApi } from './api.js';
import { EditTools, STATIONARY_ALPHA } from './editTools.js';
import { renderFrame } from './render.js';
import { StepControl } from './stepControl.js';
import { ExportFormat, SkeletonNodeView } from './types.js';
import { ViewModel } from './viewModel.js';

const DEFAULT_DOC = {
    loops: [
        [
            [0, 0],
            [1, 0],
            [1, 1],
            [0, 1],
        ],
    ],
    edges: [{ weight: 1 }, { weight: 1 }, { weight: 1 }, { weight: 1 }],
};

function el<T extends HTMLElement>(id: string): T {
    return document.getElementById(id) as T;
}

const canvas = el<HTMLCanvasElement>('canvas');
const ctx = canvas.getContext('2d')!;
const tooltip = el<HTMLDivElement>('tooltip');

const params = new URLSearchParams(window.location.search);
const api = new SessionApi(params.get('api') ?? 'http://127.0.0.1:8000');
const vm = new ViewModel(canvas.clientWidth, canvas.clientHeight);
const stepper = new StepControl(api, vm);
const editor = new EditTools(api, vm);

let dirty = true;

function markDirty(): void {
    dirty = true;
}

// polling after mutating calls: the envelopes already carry fresh state,
// and one follow-up GET keeps the view aligned with the server's own view
async function refresh(): Promise<void> {
    if (vm.state === null) {
        return;
    }
    try {
        vm.applyState(await api.state(vm.state.id));
    } catch (err) {
        if (err instanceof ApiError) {
            vm.notice = err.message;
        }
    }
    markDirty();
}

// -- session lifecycle --------------------------------------------------------

async function createSession(): Promise<void> {
    let doc: unknown;
    try {
        doc = JSON.parse(el<HTMLTextAreaElement>('doc').value);
    } catch (err) {
        vm.notice = `document is not valid JSON: ${(err as Error).message}`;
        markDirty();
        return;
    }
    try {
        const { id, state } = await api.create(doc as never);
        el<HTMLInputElement>('session-id').value = id;
        vm.applyState(state);
        vm.notice = `session ${id} created`;
    } catch (err) {
        if (err instanceof ApiError) {
            vm.notice = err.message;
        }
    }
    markDirty();
}

async function attachSession(): Promise<void> {
    const id = el<HTMLInputElement>('session-id').value.trim();
    if (id === '') {
        return;
    }
    try {
        vm.applyState(await api.state(id));
        vm.notice = `attached to ${id}`;
    } catch (err) {
        if (err instanceof ApiError) {
            vm.notice = err.message;
        }
    }
    markDirty();
}

async function exportAs(format: ExportFormat): Promise<void> {
    if (vm.state === null) {
        return;
    }
    try {
        const bytes = await api.exportBytes(vm.state.id, format);
        const blob = new Blob([bytes.buffer as ArrayBuffer]);
        const a = document.createElement('a');
        a.href = URL.createObjectURL(blob);
        a.download = `${vm.state.id}.${format}`;
        a.click();
        URL.revokeObjectURL(a.href);
    } catch (err) {
        if (err instanceof ApiError) {
            vm.notice = err.message;
            markDirty();
        }
    }
}

// -- canvas interaction --------------------------------------------------------

function canvasPoint(ev: MouseEvent): [number, number] {
    const rect = canvas.getBoundingClientRect();
    return [ev.clientX - rect.left, ev.clientY - rect.top];
}

canvas.addEventListener('click', (ev) => {
    const [sx, sy] = canvasPoint(ev);
    if (el<HTMLInputElement>('insert-mode').checked) {
        const hit = vm.pickEdge(sx, sy);
        if (hit !== null && hit.kind === 'edge') {
            const [wx, wy] = vm.toWorld(sx, sy);
            void editor.insertVertex(hit.loop, hit.edge, [wx, wy]).then(() => refresh());
        } else {
            vm.notice = 'click near an edge to insert a vertex';
        }
        markDirty();
        return;
    }
    vm.selection = vm.pick(sx, sy);
    markDirty();
});

function nearestNode(sx: number, sy: number, radius = 8): SkeletonNodeView | null {
    if (vm.state === null) {
        return null;
    }
    let best: SkeletonNodeView | null = null;
    let bestDist = radius;
    for (const n of vm.state.skeleton.nodes) {
        const [x, y] = vm.toScreen(n.x, n.y);
        const d = Math.hypot(x - sx, y - sy);
        if (d <= bestDist) {
            bestDist = d;
            best = n;
        }
    }
    return best;
}

canvas.addEventListener('mousemove', (ev) => {
    const [sx, sy] = canvasPoint(ev);
    const node = nearestNode(sx, sy);
    if (node === null) {
        tooltip.style.display = 'none';
        return;
    }
    // roof height at the node, straight from the engine
    tooltip.textContent = `${node.kind} node — roof z = ${node.z}`;
    tooltip.style.display = 'block';
    tooltip.style.left = `${sx + 12}px`;
    tooltip.style.top = `${sy - 8}px`;
});

// -- toolbar --------------------------------------------------------------------

el<HTMLButtonElement>('create').addEventListener('click', () => void createSession());
el<HTMLButtonElement>('attach').addEventListener('click', () => void attachSession());

el<HTMLInputElement>('step-size').addEventListener('change', (ev) => {
    const value = parseFloat((ev.target as HTMLInputElement).value);
    if (Number.isFinite(value) && value > 0) {
        vm.playback.stepSize = value;
    }
});
el<HTMLInputElement>('auto-pause').addEventListener('change', (ev) => {
    vm.playback.autoPauseOnEvent = (ev.target as HTMLInputElement).checked;
});

el<HTMLButtonElement>('step').addEventListener('click', () => {
    void stepper.step().then(() => refresh());
});
el<HTMLButtonElement>('undo').addEventListener('click', () => {
    void editor.undo().then(() => refresh());
});

function selectedEdge(): { loop: number; edge: number } | null {
    const sel = vm.selection;
    if (sel === null || sel.kind !== 'edge') {
        vm.notice = 'select an edge first';
        markDirty();
        return null;
    }
    return sel;
}

el<HTMLButtonElement>('set-alpha').addEventListener('click', () => {
    const sel = selectedEdge();
    if (sel === null) {
        return;
    }
    const alpha = parseFloat(el<HTMLInputElement>('alpha').value);
    void editor.setAlpha(sel.loop, sel.edge, alpha).then(() => refresh());
});
el<HTMLButtonElement>('stationary').addEventListener('click', () => {
    const sel = selectedEdge();
    if (sel === null) {
        return;
    }
    void editor.setAlpha(sel.loop, sel.edge, STATIONARY_ALPHA).then(() => refresh());
});
el<HTMLButtonElement>('remove-vertex').addEventListener('click', () => {
    const sel = vm.selection;
    if (sel === null || sel.kind !== 'vertex') {
        vm.notice = 'select a vertex first';
        markDirty();
        return;
    }
    void editor.removeVertex(sel.id).then(() => refresh());
});

el<HTMLButtonElement>('export-json').addEventListener('click', () => void exportAs('json'));
el<HTMLButtonElement>('export-svg').addEventListener('click', () => void exportAs('svg'));
el<HTMLButtonElement>('export-obj').addEventListener('click', () => void exportAs('obj'));

// -- status and rendering loop ----------------------------------------------------

function updateControls(): void {
    const stepButton = el<HTMLButtonElement>('step');
    const reason = stepper.disabledReason();
    stepButton.disabled = reason !== null;
    stepButton.title = reason ?? 'advance by Δz';

    el<HTMLButtonElement>('undo').disabled = !editor.undoEnabled;
    for (const id of ['set-alpha', 'stationary', 'remove-vertex']) {
        el<HTMLButtonElement>(id).disabled = !editor.enabled;
    }
    // exports stay enabled in every state, including faulted

    const status = el<HTMLDivElement>('status');
    if (vm.state === null) {
        status.textContent = 'no session';
    } else {
        const counts = vm.markerCounts();
        const marks = Object.keys(counts)
            .sort()
            .map((k) => `${k}: ${counts[k]}`)
            .join(', ');
        status.textContent =
            `z = ${vm.state.z} — ${vm.state.status}` + (marks === '' ? '' : ` — ${marks}`);
    }
    el<HTMLDivElement>('notice').textContent = vm.notice ?? '';

    const sel = vm.selection;
    el<HTMLDivElement>('selection').textContent =
        sel === null
            ? 'nothing selected'
            : sel.kind === 'vertex'
              ? `vertex ${sel.id} (loop ${sel.loop})`
              : `edge ${sel.edge} of loop ${sel.loop}`;

    const strip = el<HTMLDivElement>('history');
    strip.replaceChildren(
        ...vm.history().map((entry) => {
            const span = document.createElement('span');
            span.textContent = `z=${entry.z.toPrecision(4)}`;
            if (vm.highlightZ === entry.z) {
                span.classList.add('lit');
            }
            span.addEventListener('click', () => {
                vm.highlightZ = vm.highlightZ === entry.z ? null : entry.z;
                markDirty();
            });
            return span;
        }),
    );
}

function frame(): void {
    if (dirty) {
        dirty = false;
        const w = canvas.clientWidth;
        const h = canvas.clientHeight;
        if (canvas.width !== w || canvas.height !== h) {
            canvas.width = w;
            canvas.height = h;
            vm.resize(w, h);
        }
        renderFrame(ctx, vm, w, h);
        updateControls();
    }
    requestAnimationFrame(frame);
}

window.addEventListener('resize', markDirty);

el<HTMLTextAreaElement>('doc').value = JSON.stringify(DEFAULT_DOC, null, 1);
requestAnimationFrame(frame);
