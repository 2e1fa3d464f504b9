// Stepping behavior: pause-at-event, remainder re-requests, the disabled
// control after termination, and inline error surfacing.

import { describe, expect, it } from 'vitest';

import { ApiError, SessionApi } from '../src/api.js';
import { StepControl } from '../src/stepControl.js';
import { EventView, SessionView, StepView } from '../src/types.js';
import { ViewModel } from '../src/viewModel.js';
import { squareState } from './helpers.js';

function collapseAt(z: number): EventView {
    return { kind: 'collapse', contact: null, t: z, z, x: 0.5, y: 0.5 };
}

function scriptedApi(script: { result: StepView; state: SessionView }[]) {
    const calls: number[] = [];
    const api = {
        pending: () => false,
        step: async (_id: string, dz: number) => {
            calls.push(dz);
            const next = script.shift();
            if (next === undefined) {
                throw new Error('script exhausted');
            }
            return next;
        },
    } as unknown as SessionApi;
    return { api, calls };
}

describe('StepControl', () => {
    it('halts at the first event batch when auto-pause is on', async () => {
        const { api, calls } = scriptedApi([
            {
                result: { advanced_dz: 0.3, events: [collapseAt(0.5)], status: 'running', z: 0.5 },
                state: squareState({ z: 0.5, events: [collapseAt(0.5)] }),
            },
        ]);
        const vm = new ViewModel();
        vm.applyState(squareState({ z: 0.2 }));
        vm.playback = { stepSize: 1.0, autoPauseOnEvent: true };

        const summary = await new StepControl(api, vm).step();
        expect(calls).toEqual([1.0]); // one large request; the engine truncates
        expect(summary?.pausedAtEvent).toBe(true);
        expect(summary?.events).toHaveLength(1);
        expect(vm.state?.z).toBe(0.5);
    });

    it('re-requests the remainder past events when auto-pause is off', async () => {
        const { api, calls } = scriptedApi([
            {
                result: { advanced_dz: 0.3, events: [collapseAt(0.3)], status: 'running', z: 0.3 },
                state: squareState({ z: 0.3 }),
            },
            {
                result: { advanced_dz: 0.2, events: [], status: 'running', z: 0.5 },
                state: squareState({ z: 0.5 }),
            },
        ]);
        const vm = new ViewModel();
        vm.applyState(squareState());
        vm.playback = { stepSize: 0.5, autoPauseOnEvent: false };

        const summary = await new StepControl(api, vm).step();
        expect(calls).toHaveLength(2);
        expect(calls[0]).toBe(0.5);
        expect(calls[1]).toBeCloseTo(0.2, 12);
        expect(summary?.advancedDz).toBeCloseTo(0.5, 12);
        expect(summary?.pausedAtEvent).toBe(false);
    });

    it('stops as soon as the wavefront terminates', async () => {
        const { api, calls } = scriptedApi([
            {
                result: {
                    advanced_dz: 0.5,
                    events: [collapseAt(0.5)],
                    status: 'terminated',
                    z: 0.5,
                },
                state: squareState({ z: 0.5, status: 'terminated' }),
            },
        ]);
        const vm = new ViewModel();
        vm.applyState(squareState());
        vm.playback = { stepSize: 2.0, autoPauseOnEvent: false };

        const summary = await new StepControl(api, vm).step();
        expect(calls).toEqual([2.0]);
        expect(summary?.status).toBe('terminated');
    });

    it('is disabled with an explanatory tooltip after termination', async () => {
        const { api, calls } = scriptedApi([]);
        const vm = new ViewModel();
        vm.applyState(squareState({ status: 'terminated', z: 0.5 }));

        const control = new StepControl(api, vm);
        expect(control.enabled).toBe(false);
        expect(control.disabledReason()).toContain('terminated');
        expect(await control.step()).toBeNull();
        expect(calls).toEqual([]);
    });

    it('is disabled while a mutating request is in flight', () => {
        const api = { pending: () => true } as unknown as SessionApi;
        const vm = new ViewModel();
        vm.applyState(squareState());
        expect(new StepControl(api, vm).disabledReason()).toContain('in flight');
    });

    it('surfaces service rejections inline instead of throwing', async () => {
        const api = {
            pending: () => false,
            step: async () => {
                throw new ApiError(422, 'step height must be positive');
            },
        } as unknown as SessionApi;
        const vm = new ViewModel();
        vm.applyState(squareState());
        vm.playback = { stepSize: 0.1, autoPauseOnEvent: false };

        const summary = await new StepControl(api, vm).step();
        expect(summary).toBeNull();
        expect(vm.notice).toBe('step height must be positive');
    });

    it('stops on a faulted step result', async () => {
        const faulted = squareState({ status: 'faulted', fault: 'tolerance collapse', z: 0.2 });
        const { api, calls } = scriptedApi([
            {
                result: {
                    advanced_dz: 0,
                    events: [],
                    status: 'faulted',
                    z: 0.2,
                    fault: 'tolerance collapse',
                },
                state: faulted,
            },
        ]);
        const vm = new ViewModel();
        vm.applyState(squareState({ z: 0.2 }));
        vm.playback = { stepSize: 1.0, autoPauseOnEvent: false };

        const summary = await new StepControl(api, vm).step();
        expect(calls).toHaveLength(1);
        expect(summary?.status).toBe('faulted');
        expect(vm.state?.fault).toBe('tolerance collapse');
    });
});
