// Client-side view state: the canvas transform, selection, pending edit,
// playback settings and the snapshot history strip.  Geometry is never
// mutated here -- edits only happen through the edit endpoints -- and all
// coordinates come from the engine's state view.

import { EditSpec, EventView, SessionView } from './types.js';

export interface Transform {
    scale: number;
    offsetX: number;
    offsetY: number;
}

export type Selection =
    | { kind: 'vertex'; loop: number; index: number; id: number }
    | { kind: 'edge'; loop: number; edge: number }
    | null;

export interface Playback {
    stepSize: number;
    autoPauseOnEvent: boolean;
}

export interface HistoryEntry {
    z: number;
    rings: number[][][];
}

interface Bounds {
    minX: number;
    maxX: number;
    minY: number;
    maxY: number;
}

const IDENTITY: Transform = { scale: 1, offsetX: 0, offsetY: 0 };

export class ViewModel {
    state: SessionView | null = null;
    transform: Transform = { ...IDENTITY };
    selection: Selection = null;
    pendingEdit: EditSpec | null = null;
    playback: Playback = { stepSize: 0.1, autoPauseOnEvent: false };
    notice: string | null = null;
    highlightZ: number | null = null;
    glyphScale = 0.1;

    constructor(
        private width = 800,
        private height = 600,
        private margin = 24,
    ) {}

    applyState(state: SessionView): void {
        this.state = state;
        this.fit();
        if (this.selection !== null && !this.selectionStillValid()) {
            this.selection = null;
        }
    }

    inputLoops(): number[][][] {
        return this.state === null ? [] : this.state.input_loops;
    }

    resize(width: number, height: number): void {
        this.width = width;
        this.height = height;
        this.fit();
    }

    // -- viewport transform ------------------------------------------------

    fit(): void {
        const b = this.bounds();
        if (b === null) {
            this.transform = { ...IDENTITY };
            return;
        }
        const dx = Math.max(b.maxX - b.minX, 1e-9);
        const dy = Math.max(b.maxY - b.minY, 1e-9);
        const availW = this.width - 2 * this.margin;
        const availH = this.height - 2 * this.margin;
        const scale = Math.min(availW / dx, availH / dy);
        const padX = (availW - dx * scale) / 2;
        const padY = (availH - dy * scale) / 2;
        this.transform = {
            scale,
            offsetX: this.margin + padX - b.minX * scale,
            offsetY: this.height - this.margin - padY + b.minY * scale,
        };
        this.glyphScale = 0.06 * Math.max(dx, dy);
    }

    toScreen(x: number, y: number): [number, number] {
        const t = this.transform;
        return [x * t.scale + t.offsetX, t.offsetY - y * t.scale];
    }

    toWorld(sx: number, sy: number): [number, number] {
        const t = this.transform;
        return [(sx - t.offsetX) / t.scale, (t.offsetY - sy) / t.scale];
    }

    private bounds(): Bounds | null {
        const xs: number[] = [];
        const ys: number[] = [];
        const take = (x: number, y: number) => {
            xs.push(x);
            ys.push(y);
        };
        for (const ring of this.inputLoops()) {
            for (const [x, y] of ring) take(x, y);
        }
        if (this.state !== null) {
            for (const loop of this.state.loops) {
                for (const v of loop.vertices) take(v.x, v.y);
            }
            for (const snap of this.state.snapshots) {
                for (const ring of snap.loops) {
                    for (const [x, y] of ring) take(x, y);
                }
            }
            for (const n of this.state.skeleton.nodes) take(n.x, n.y);
        }
        if (xs.length === 0) {
            return null;
        }
        return {
            minX: Math.min(...xs),
            maxX: Math.max(...xs),
            minY: Math.min(...ys),
            maxY: Math.max(...ys),
        };
    }

    // -- derived views -------------------------------------------------------

    history(): HistoryEntry[] {
        if (this.state === null) {
            return [];
        }
        return this.state.snapshots.map((s) => ({ z: s.z, rings: s.loops }));
    }

    markers(): EventView[] {
        return this.state === null ? [] : this.state.events;
    }

    markerCounts(): Record<string, number> {
        const counts: Record<string, number> = {};
        for (const e of this.markers()) {
            counts[e.kind] = (counts[e.kind] ?? 0) + 1;
        }
        return counts;
    }

    // -- selection and hit-testing -------------------------------------------

    pickVertex(sx: number, sy: number, radius = 10): Selection {
        if (this.state === null) {
            return null;
        }
        let best: Selection = null;
        let bestDist = radius;
        this.state.loops.forEach((loop, li) => {
            loop.vertices.forEach((v, vi) => {
                const [px, py] = this.toScreen(v.x, v.y);
                const d = Math.hypot(px - sx, py - sy);
                if (d <= bestDist) {
                    bestDist = d;
                    best = { kind: 'vertex', loop: li, index: vi, id: v.id };
                }
            });
        });
        return best;
    }

    pickEdge(sx: number, sy: number, radius = 8): Selection {
        if (this.state === null) {
            return null;
        }
        let best: Selection = null;
        let bestDist = radius;
        this.state.loops.forEach((loop, li) => {
            const m = loop.vertices.length;
            loop.vertices.forEach((v, vi) => {
                const w = loop.vertices[(vi + 1) % m];
                const a = this.toScreen(v.x, v.y);
                const b = this.toScreen(w.x, w.y);
                const d = distToSegment(sx, sy, a[0], a[1], b[0], b[1]);
                if (d <= bestDist) {
                    bestDist = d;
                    best = { kind: 'edge', loop: li, edge: vi };
                }
            });
        });
        return best;
    }

    pick(sx: number, sy: number): Selection {
        return this.pickVertex(sx, sy) ?? this.pickEdge(sx, sy);
    }

    private selectionStillValid(): boolean {
        const sel = this.selection;
        if (sel === null || this.state === null) {
            return false;
        }
        if (sel.kind === 'vertex') {
            const loop = this.state.loops[sel.loop];
            return loop !== undefined && loop.vertices[sel.index]?.id === sel.id;
        }
        const loop = this.state.loops[sel.loop];
        return loop !== undefined && sel.edge < loop.edges.length;
    }
}

function distToSegment(
    px: number,
    py: number,
    ax: number,
    ay: number,
    bx: number,
    by: number,
): number {
    const dx = bx - ax;
    const dy = by - ay;
    const lenSq = dx * dx + dy * dy;
    if (lenSq === 0) {
        return Math.hypot(px - ax, py - ay);
    }
    const t = Math.max(0, Math.min(1, ((px - ax) * dx + (py - ay) * dy) / lenSq));
    return Math.hypot(px - (ax + t * dx), py - (ay + t * dy));
}
