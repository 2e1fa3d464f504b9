// Stepping logic.  A step request always goes out for the playback step
// size; the engine truncates at the first event batch, so with
// auto-pause-on-event set we simply stop there and show the events.
// Without it, the remainder is re-requested until the full height is
// consumed or the wavefront terminates.

import { ApiError, MutationPending, SessionApi } from './api.js';
import { EventView, SessionStatus } from './types.js';
import { ViewModel } from './viewModel.js';

const REMAINDER_EPS = 1e-12;

export interface StepSummary {
    advancedDz: number;
    events: EventView[];
    status: SessionStatus;
    pausedAtEvent: boolean;
}

export class StepControl {
    constructor(
        private api: SessionApi,
        private vm: ViewModel,
    ) {}

    get enabled(): boolean {
        return this.disabledReason() === null;
    }

    // tooltip text for the disabled control; null when stepping is allowed
    disabledReason(): string | null {
        const state = this.vm.state;
        if (state === null) {
            return 'no session';
        }
        if (state.status === 'terminated') {
            return 'the wavefront has terminated; undo or export';
        }
        if (state.status === 'faulted') {
            return 'the session has faulted; only undo and export remain';
        }
        if (this.api.pending(state.id)) {
            return 'a request is already in flight';
        }
        return null;
    }

    async step(): Promise<StepSummary | null> {
        if (!this.enabled || this.vm.state === null) {
            return null;
        }
        const id = this.vm.state.id;
        const summary: StepSummary = {
            advancedDz: 0,
            events: [],
            status: this.vm.state.status,
            pausedAtEvent: false,
        };
        let remaining = this.vm.playback.stepSize;
        try {
            while (remaining > REMAINDER_EPS) {
                const { result, state } = await this.api.step(id, remaining);
                this.vm.applyState(state);
                summary.advancedDz += result.advanced_dz;
                summary.events.push(...result.events);
                summary.status = result.status;
                if (result.status !== 'running') {
                    break;
                }
                if (this.vm.playback.autoPauseOnEvent && result.events.length > 0) {
                    summary.pausedAtEvent = true;
                    break;
                }
                if (result.advanced_dz <= 0) {
                    break;
                }
                remaining -= result.advanced_dz;
            }
        } catch (err) {
            if (err instanceof ApiError || err instanceof MutationPending) {
                this.vm.notice = err.message;
                return null;
            }
            throw err;
        }
        this.vm.notice = describeStep(summary);
        return summary;
    }
}

function describeStep(s: StepSummary): string {
    const parts = [`advanced Δz=${s.advancedDz.toPrecision(6)}`];
    if (s.events.length > 0) {
        parts.push(`${s.events.length} event${s.events.length === 1 ? '' : 's'}`);
    }
    if (s.status !== 'running') {
        parts.push(s.status);
    } else if (s.pausedAtEvent) {
        parts.push('paused at event');
    }
    return parts.join(', ');
}
