// Edit tools: client-side inclination validation, endpoint delegation,
// undo gating, and inline error surfacing.

import { describe, expect, it } from 'vitest';

import { ApiError, SessionApi } from '../src/api.js';
import { EditTools, STATIONARY_ALPHA, validateAlpha } from '../src/editTools.js';
import { EditSpec, SessionView } from '../src/types.js';
import { ViewModel } from '../src/viewModel.js';
import { squareState } from './helpers.js';

function editApi(next: SessionView = squareState({ journal_length: 1 })) {
    const edits: EditSpec[] = [];
    let undos = 0;
    const api = {
        pending: () => false,
        edit: async (_id: string, spec: EditSpec) => {
            edits.push(spec);
            return { state: next };
        },
        undo: async () => {
            undos++;
            return { state: next };
        },
    } as unknown as SessionApi;
    return { api, edits, undone: () => undos };
}

describe('validateAlpha', () => {
    it.each([0.01, Math.PI / 4, STATIONARY_ALPHA, 3.1])('accepts %f', (alpha) => {
        expect(validateAlpha(alpha)).toBeNull();
    });

    it.each([0, -0.5, Math.PI, 4.0, NaN, Infinity])('rejects %f', (alpha) => {
        expect(validateAlpha(alpha)).not.toBeNull();
    });
});

describe('EditTools', () => {
    it('rejects an out-of-range inclination before anything is sent', async () => {
        const { api, edits } = editApi();
        const vm = new ViewModel();
        vm.applyState(squareState());

        const ok = await new EditTools(api, vm).setAlpha(0, 2, 4.0);
        expect(ok).toBe(false);
        expect(edits).toEqual([]);
        expect(vm.notice).toContain('between 0 and π');
    });

    it('sends a valid inclination and applies the returned state', async () => {
        const next = squareState({ journal_length: 1, z: 0.2 });
        const { api, edits } = editApi(next);
        const vm = new ViewModel();
        vm.applyState(squareState());
        vm.pendingEdit = { set_alpha: { loop: 0, edge: 2, alpha: STATIONARY_ALPHA } };

        const ok = await new EditTools(api, vm).setAlpha(0, 2, STATIONARY_ALPHA);
        expect(ok).toBe(true);
        expect(edits).toEqual([{ set_alpha: { loop: 0, edge: 2, alpha: STATIONARY_ALPHA } }]);
        expect(vm.state).toBe(next);
        expect(vm.pendingEdit).toBeNull();
    });

    it('delegates vertex insertion and removal to the edit endpoint', async () => {
        const { api, edits } = editApi();
        const vm = new ViewModel();
        vm.applyState(squareState());
        const tools = new EditTools(api, vm);

        await tools.insertVertex(0, 0, [0.5, 0]);
        await tools.removeVertex(3);
        expect(edits).toEqual([
            { insert_vertex: { loop: 0, edge: 0, point: [0.5, 0] } },
            { remove_vertex: { id: 3 } },
        ]);
    });

    it('refuses edits when the session is not running', async () => {
        const { api, edits } = editApi();
        const vm = new ViewModel();
        vm.applyState(squareState({ status: 'terminated' }));

        const tools = new EditTools(api, vm);
        expect(tools.enabled).toBe(false);
        expect(await tools.insertVertex(0, 0, [0.5, 0])).toBe(false);
        expect(edits).toEqual([]);
    });

    it('surfaces service rejections inline', async () => {
        const api = {
            pending: () => false,
            edit: async () => {
                throw new ApiError(422, 'vertex id 9 is stale or unknown');
            },
        } as unknown as SessionApi;
        const vm = new ViewModel();
        vm.applyState(squareState());

        const ok = await new EditTools(api, vm).removeVertex(9);
        expect(ok).toBe(false);
        expect(vm.notice).toBe('vertex id 9 is stale or unknown');
    });

    it('gates undo on a non-empty journal', async () => {
        const { api, undone } = editApi();
        const vm = new ViewModel();
        vm.applyState(squareState({ journal_length: 0 }));

        const tools = new EditTools(api, vm);
        expect(tools.undoEnabled).toBe(false);
        expect(await tools.undo()).toBe(false);
        expect(undone()).toBe(0);

        vm.applyState(squareState({ journal_length: 2 }));
        expect(tools.undoEnabled).toBe(true);
        expect(await tools.undo()).toBe(true);
        expect(undone()).toBe(1);
    });
});
