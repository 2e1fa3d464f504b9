// Frame rendering: which layers get drawn, in which colors, and the fault
// banner.  The recording context stands in for the canvas.

import { describe, expect, it } from 'vitest';

import { MARKER_COLORS, renderFrame } from '../src/render.js';
import { SessionView } from '../src/types.js';
import { ViewModel } from '../src/viewModel.js';
import { recordingCtx, squareState } from './helpers.js';

function midRunState(): SessionView {
    return squareState({
        z: 0.5,
        status: 'terminated',
        snapshots: [
            { z: 0.25, loops: [[[0.25, 0.25], [0.75, 0.25], [0.75, 0.75], [0.25, 0.75]]] },
            { z: 0.5, loops: [] },
        ],
        skeleton: {
            nodes: [
                { id: 0, x: 0, y: 0, z: 0, kind: 'input' },
                { id: 1, x: 1, y: 0, z: 0, kind: 'input' },
                { id: 2, x: 1, y: 1, z: 0, kind: 'input' },
                { id: 3, x: 0, y: 1, z: 0, kind: 'input' },
                { id: 4, x: 0.5, y: 0.5, z: 0.5, kind: 'collapse' },
            ],
            arcs: [
                { a: 0, b: 4 },
                { a: 1, b: 4 },
                { a: 2, b: 4 },
                { a: 3, b: 4 },
            ],
        },
        events: [
            { kind: 'collapse', contact: null, t: 0.5, z: 0.5, x: 0.5, y: 0.5 },
            { kind: 'split', contact: 'vertex', t: 0.5, z: 0.5, x: 0.5, y: 0.5 },
        ],
        loops: [],
    });
}

describe('renderFrame', () => {
    it('draws every layer and reports what it drew', () => {
        const vm = new ViewModel(400, 400);
        vm.applyState(midRunState());
        const { ctx, rec } = recordingCtx();
        const stats = renderFrame(ctx, vm, 400, 400);

        expect(stats.inputRings).toBe(1);
        expect(stats.snapshots).toBe(2);
        expect(stats.arcs).toBe(4);
        expect(stats.nodes).toBe(1); // the interior collapse node
        expect(stats.markers).toEqual({ collapse: 1, split: 1 });
        expect(stats.banner).toBe(false);
        expect(rec.calls('stroke').length).toBeGreaterThan(0);
    });

    it('colors markers by event kind', () => {
        const vm = new ViewModel(400, 400);
        vm.applyState(midRunState());
        const { ctx, rec } = recordingCtx();
        renderFrame(ctx, vm, 400, 400);

        const fills = rec.calls('fill').map((o) => o.fillStyle);
        expect(fills).toContain(MARKER_COLORS.collapse);
        expect(fills).toContain(MARKER_COLORS.split);
    });

    it('draws velocity glyphs only for moving vertices', () => {
        const state = squareState();
        state.loops[0].vertices[0].vx = 0;
        state.loops[0].vertices[0].vy = 0;
        const vm = new ViewModel(400, 400);
        vm.applyState(state);
        const { ctx } = recordingCtx();
        const stats = renderFrame(ctx, vm, 400, 400);
        expect(stats.glyphs).toBe(3);
    });

    it('shows the fault banner on a faulted session', () => {
        const vm = new ViewModel(400, 400);
        vm.applyState(squareState({ status: 'faulted', fault: 'tolerance collapse' }));
        const { ctx, rec } = recordingCtx();
        const stats = renderFrame(ctx, vm, 400, 400);

        expect(stats.banner).toBe(true);
        const texts = rec.calls('fillText').map((o) => String(o.args[0]));
        expect(texts.some((t) => t.includes('tolerance collapse'))).toBe(true);
        expect(texts.some((t) => t.includes('export'))).toBe(true);
    });

    it('renders an empty frame before any session exists', () => {
        const vm = new ViewModel(400, 400);
        const { ctx, rec } = recordingCtx();
        const stats = renderFrame(ctx, vm, 400, 400);
        expect(stats.inputRings).toBe(0);
        expect(rec.calls('fillRect').length).toBe(1); // background only
    });

    it('draws the identical frame for the identical state view', () => {
        const vmA = new ViewModel(400, 400);
        const vmB = new ViewModel(400, 400);
        vmA.applyState(midRunState());
        vmB.applyState(midRunState());
        const a = recordingCtx();
        const b = recordingCtx();
        renderFrame(a.ctx, vmA, 400, 400);
        renderFrame(b.ctx, vmB, 400, 400);
        expect(a.rec.ops).toEqual(b.rec.ops);
    });
});
