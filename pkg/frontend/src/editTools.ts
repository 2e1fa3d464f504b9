// Edit operations: per-edge inclination, vertex insert/remove, undo.
// Inclination input is validated client-side before anything is sent;
// everything else is validated by the engine and its errors are surfaced
// inline.

import { ApiError, MutationPending, SessionApi } from './api.js';
import { SessionView } from './types.js';
import { ViewModel } from './viewModel.js';

export const STATIONARY_ALPHA = Math.PI / 2;

// inclination lives strictly inside (0, π): 0 and π are degenerate planes
export function validateAlpha(alpha: number): string | null {
    if (!Number.isFinite(alpha)) {
        return 'inclination must be a number';
    }
    if (alpha <= 0 || alpha >= Math.PI) {
        return 'inclination must lie strictly between 0 and π';
    }
    return null;
}

export class EditTools {
    constructor(
        private api: SessionApi,
        private vm: ViewModel,
    ) {}

    get enabled(): boolean {
        const state = this.vm.state;
        return state !== null && state.status === 'running' && !this.api.pending(state.id);
    }

    get undoEnabled(): boolean {
        const state = this.vm.state;
        return state !== null && state.journal_length > 0 && !this.api.pending(state.id);
    }

    async setAlpha(loop: number, edge: number, alpha: number): Promise<boolean> {
        const problem = validateAlpha(alpha);
        if (problem !== null) {
            this.vm.notice = problem;
            return false;
        }
        return await this.submit({ set_alpha: { loop, edge, alpha } });
    }

    async insertVertex(loop: number, edge: number, point: [number, number]): Promise<boolean> {
        return await this.submit({ insert_vertex: { loop, edge, point } });
    }

    async removeVertex(id: number): Promise<boolean> {
        return await this.submit({ remove_vertex: { id } });
    }

    async undo(): Promise<boolean> {
        const state = this.vm.state;
        if (state === null || !this.undoEnabled) {
            return false;
        }
        try {
            const { state: next } = await this.api.undo(state.id);
            this.vm.applyState(next);
            this.vm.pendingEdit = null;
            this.vm.notice = 'undid last operation';
            return true;
        } catch (err) {
            return this.surface(err);
        }
    }

    private async submit(spec: Parameters<SessionApi['edit']>[1]): Promise<boolean> {
        const state = this.vm.state;
        if (state === null || !this.enabled) {
            return false;
        }
        try {
            const { state: next } = await this.api.edit(state.id, spec);
            this.applyEdited(next);
            return true;
        } catch (err) {
            return this.surface(err);
        }
    }

    private applyEdited(next: SessionView): void {
        this.vm.applyState(next);
        this.vm.pendingEdit = null;
        this.vm.notice = 'edit applied';
    }

    private surface(err: unknown): boolean {
        if (err instanceof ApiError || err instanceof MutationPending) {
            this.vm.notice = err.message;
            return false;
        }
        throw err;
    }
}
