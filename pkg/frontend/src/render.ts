// Canvas rendering of a session frame: the input polygon, every offset
// snapshot, the skeleton arcs drawn so far, event markers colored by kind
// and velocity glyphs on the active vertices.  Returns a small summary of
// what was drawn so callers (and tests) can check the frame's content.

import { SessionView } from './types.js';
import { ViewModel } from './viewModel.js';

const CLR_BACKGROUND = '#FFFFFF';
const CLR_INPUT = '#1A1A1A';
const CLR_SNAPSHOT = '#607D8B';
const CLR_ACTIVE = '#1565C0';
const CLR_ARC = '#C62828';
const CLR_NODE = '#4E342E';
const CLR_GLYPH = '#2E7D32';
const CLR_RIDGE = '#8D6E63';
const CLR_SELECT = '#FF8F00';
const CLR_BANNER = 'rgba(183, 28, 28, 0.9)';
const CLR_BANNER_TEXT = '#FFFFFF';

export const MARKER_COLORS: Record<string, string> = {
    collapse: '#EF6C00',
    split: '#6A1B9A',
};
const CLR_MARKER_OTHER = '#546E7A';

const MARKER_RADIUS = 4.5;
const NODE_RADIUS = 2;
const BANNER_HEIGHT = 30;

export interface RenderStats {
    snapshots: number;
    inputRings: number;
    activeRings: number;
    ridgeRings: number;
    arcs: number;
    nodes: number;
    glyphs: number;
    markers: Record<string, number>;
    banner: boolean;
}

export function renderFrame(
    ctx: CanvasRenderingContext2D,
    vm: ViewModel,
    width: number,
    height: number,
): RenderStats {
    const stats: RenderStats = {
        snapshots: 0,
        inputRings: 0,
        activeRings: 0,
        ridgeRings: 0,
        arcs: 0,
        nodes: 0,
        glyphs: 0,
        markers: {},
        banner: false,
    };
    ctx.fillStyle = CLR_BACKGROUND;
    ctx.fillRect(0, 0, width, height);
    const state = vm.state;
    if (state === null) {
        return stats;
    }

    drawSnapshots(ctx, vm, stats);
    drawInput(ctx, vm, stats);
    drawActiveLoops(ctx, vm, state, stats);
    drawRidges(ctx, vm, state, stats);
    drawArcs(ctx, vm, state, stats);
    drawMarkers(ctx, vm, stats);
    drawGlyphs(ctx, vm, state, stats);
    drawSelection(ctx, vm, state);

    if (state.status === 'faulted') {
        stats.banner = true;
        ctx.fillStyle = CLR_BANNER;
        ctx.fillRect(0, 0, width, BANNER_HEIGHT);
        ctx.fillStyle = CLR_BANNER_TEXT;
        ctx.font = '13px sans-serif';
        const message = state.fault ?? 'robustness fault';
        ctx.fillText(`fault: ${message} — controls disabled, export remains available`, 10, 19);
    }
    return stats;
}

function strokeRing(ctx: CanvasRenderingContext2D, vm: ViewModel, ring: number[][]): void {
    if (ring.length === 0) {
        return;
    }
    ctx.beginPath();
    const [x0, y0] = vm.toScreen(ring[0][0], ring[0][1]);
    ctx.moveTo(x0, y0);
    for (let i = 1; i < ring.length; i++) {
        const [x, y] = vm.toScreen(ring[i][0], ring[i][1]);
        ctx.lineTo(x, y);
    }
    ctx.closePath();
    ctx.stroke();
}

function drawSnapshots(ctx: CanvasRenderingContext2D, vm: ViewModel, stats: RenderStats): void {
    const entries = vm.history();
    ctx.strokeStyle = CLR_SNAPSHOT;
    ctx.lineWidth = 1;
    entries.forEach((entry, i) => {
        // older snapshots fade; the highlighted one is drawn solid
        const highlighted = vm.highlightZ !== null && entry.z === vm.highlightZ;
        ctx.globalAlpha = highlighted ? 1 : 0.25 + (0.6 * (i + 1)) / entries.length;
        ctx.lineWidth = highlighted ? 2 : 1;
        for (const ring of entry.rings) {
            strokeRing(ctx, vm, ring);
        }
        stats.snapshots++;
    });
    ctx.globalAlpha = 1;
}

function drawInput(ctx: CanvasRenderingContext2D, vm: ViewModel, stats: RenderStats): void {
    ctx.strokeStyle = CLR_INPUT;
    ctx.lineWidth = 2;
    for (const ring of vm.inputLoops()) {
        strokeRing(ctx, vm, ring);
        stats.inputRings++;
    }
}

function drawActiveLoops(
    ctx: CanvasRenderingContext2D,
    vm: ViewModel,
    state: SessionView,
    stats: RenderStats,
): void {
    ctx.strokeStyle = CLR_ACTIVE;
    ctx.lineWidth = 2;
    for (const loop of state.loops) {
        strokeRing(
            ctx,
            vm,
            loop.vertices.map((v) => [v.x, v.y]),
        );
        stats.activeRings++;
    }
}

function drawRidges(
    ctx: CanvasRenderingContext2D,
    vm: ViewModel,
    state: SessionView,
    stats: RenderStats,
): void {
    if (state.terminal_loops.length === 0) {
        return;
    }
    ctx.strokeStyle = CLR_RIDGE;
    ctx.lineWidth = 1;
    ctx.setLineDash([4, 3]);
    for (const loop of state.terminal_loops) {
        strokeRing(
            ctx,
            vm,
            loop.map((v) => [v.x, v.y]),
        );
        stats.ridgeRings++;
    }
    ctx.setLineDash([]);
}

function drawArcs(
    ctx: CanvasRenderingContext2D,
    vm: ViewModel,
    state: SessionView,
    stats: RenderStats,
): void {
    const byId = new Map(state.skeleton.nodes.map((n) => [n.id, n]));
    ctx.strokeStyle = CLR_ARC;
    ctx.lineWidth = 1.5;
    for (const arc of state.skeleton.arcs) {
        const a = byId.get(arc.a);
        const b = byId.get(arc.b);
        if (a === undefined || b === undefined) {
            continue;
        }
        const [ax, ay] = vm.toScreen(a.x, a.y);
        const [bx, by] = vm.toScreen(b.x, b.y);
        ctx.beginPath();
        ctx.moveTo(ax, ay);
        ctx.lineTo(bx, by);
        ctx.stroke();
        stats.arcs++;
    }
    // interior nodes as small dots; roof heights appear as hover tooltips
    ctx.fillStyle = CLR_NODE;
    for (const n of state.skeleton.nodes) {
        if (n.kind === 'input') {
            continue;
        }
        const [x, y] = vm.toScreen(n.x, n.y);
        ctx.beginPath();
        ctx.arc(x, y, NODE_RADIUS, 0, 2 * Math.PI);
        ctx.fill();
        stats.nodes++;
    }
}

function drawMarkers(ctx: CanvasRenderingContext2D, vm: ViewModel, stats: RenderStats): void {
    for (const e of vm.markers()) {
        const [x, y] = vm.toScreen(e.x, e.y);
        ctx.fillStyle = MARKER_COLORS[e.kind] ?? CLR_MARKER_OTHER;
        ctx.beginPath();
        ctx.arc(x, y, MARKER_RADIUS, 0, 2 * Math.PI);
        ctx.fill();
        stats.markers[e.kind] = (stats.markers[e.kind] ?? 0) + 1;
    }
}

function drawGlyphs(
    ctx: CanvasRenderingContext2D,
    vm: ViewModel,
    state: SessionView,
    stats: RenderStats,
): void {
    ctx.strokeStyle = CLR_GLYPH;
    ctx.lineWidth = 1;
    for (const loop of state.loops) {
        for (const v of loop.vertices) {
            const speed = Math.hypot(v.vx, v.vy);
            if (speed === 0) {
                continue;
            }
            const tipX = v.x + v.vx * vm.glyphScale;
            const tipY = v.y + v.vy * vm.glyphScale;
            const [ax, ay] = vm.toScreen(v.x, v.y);
            const [bx, by] = vm.toScreen(tipX, tipY);
            const dx = bx - ax;
            const dy = by - ay;
            const len = Math.hypot(dx, dy);
            const ux = dx / len;
            const uy = dy / len;
            ctx.beginPath();
            ctx.moveTo(ax, ay);
            ctx.lineTo(bx, by);
            // two short barbs make the arrowhead
            ctx.moveTo(bx, by);
            ctx.lineTo(bx - 5 * ux + 3 * uy, by - 5 * uy - 3 * ux);
            ctx.moveTo(bx, by);
            ctx.lineTo(bx - 5 * ux - 3 * uy, by - 5 * uy + 3 * ux);
            ctx.stroke();
            stats.glyphs++;
        }
    }
}

function drawSelection(ctx: CanvasRenderingContext2D, vm: ViewModel, state: SessionView): void {
    const sel = vm.selection;
    if (sel === null) {
        return;
    }
    ctx.strokeStyle = CLR_SELECT;
    ctx.lineWidth = 2.5;
    if (sel.kind === 'vertex') {
        const v = state.loops[sel.loop]?.vertices[sel.index];
        if (v === undefined) {
            return;
        }
        const [x, y] = vm.toScreen(v.x, v.y);
        ctx.beginPath();
        ctx.arc(x, y, MARKER_RADIUS + 2, 0, 2 * Math.PI);
        ctx.stroke();
        return;
    }
    const loop = state.loops[sel.loop];
    if (loop === undefined) {
        return;
    }
    const m = loop.vertices.length;
    const a = loop.vertices[sel.edge];
    const b = loop.vertices[(sel.edge + 1) % m];
    const [ax, ay] = vm.toScreen(a.x, a.y);
    const [bx, by] = vm.toScreen(b.x, b.y);
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
    ctx.stroke();
}
