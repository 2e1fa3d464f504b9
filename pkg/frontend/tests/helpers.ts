// Shared fixtures: a recording canvas context, a synthetic square session
// view, and the square document used against the live service.

import { PolygonDocument, SessionView } from '../src/types.js';

export interface DrawOp {
    op: string;
    args: unknown[];
    fillStyle: string;
    strokeStyle: string;
}

// records every draw call together with the style it ran under, so tests
// can check what got drawn in which color
export class RecordingContext {
    ops: DrawOp[] = [];
    fillStyle = '';
    strokeStyle = '';
    lineWidth = 1;
    font = '';
    globalAlpha = 1;

    private record(op: string, ...args: unknown[]): void {
        this.ops.push({ op, args, fillStyle: String(this.fillStyle), strokeStyle: String(this.strokeStyle) });
    }

    beginPath(): void {
        this.record('beginPath');
    }
    closePath(): void {
        this.record('closePath');
    }
    moveTo(x: number, y: number): void {
        this.record('moveTo', x, y);
    }
    lineTo(x: number, y: number): void {
        this.record('lineTo', x, y);
    }
    arc(x: number, y: number, r: number): void {
        this.record('arc', x, y, r);
    }
    stroke(): void {
        this.record('stroke');
    }
    fill(): void {
        this.record('fill');
    }
    fillRect(x: number, y: number, w: number, h: number): void {
        this.record('fillRect', x, y, w, h);
    }
    fillText(text: string, x: number, y: number): void {
        this.record('fillText', text, x, y);
    }
    setLineDash(segments: number[]): void {
        this.record('setLineDash', segments);
    }

    calls(op: string): DrawOp[] {
        return this.ops.filter((o) => o.op === op);
    }
}

export function recordingCtx(): { ctx: CanvasRenderingContext2D; rec: RecordingContext } {
    const rec = new RecordingContext();
    return { ctx: rec as unknown as CanvasRenderingContext2D, rec };
}

export const SQUARE_DOC: PolygonDocument = {
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

// a fresh unit-square session view, field-compatible with the service
export function squareState(overrides: Partial<SessionView> = {}): SessionView {
    const corners: [number, number, number, number][] = [
        [0, 0, 1, 1],
        [1, 0, -1, 1],
        [1, 1, -1, -1],
        [0, 1, 1, -1],
    ];
    return {
        id: 'abcdef123456',
        status: 'running',
        z: 0,
        t: 0,
        input_loops: SQUARE_DOC.loops,
        loops: [
            {
                vertices: corners.map(([x, y, vx, vy], i) => ({ id: i, x, y, vx, vy })),
                edges: corners.map((_, i) => ({ alpha: Math.PI / 4, active: true, edge_key: i })),
            },
        ],
        terminal_loops: [],
        skeleton: {
            nodes: corners.map(([x, y], i) => ({ id: i, x, y, z: 0, kind: 'input' })),
            arcs: [],
        },
        snapshots: [],
        events: [],
        journal_length: 0,
        fault: null,
        ...overrides,
    };
}

export function jsonResponse(body: unknown, status = 200): Response {
    return new Response(JSON.stringify(body), {
        status,
        headers: { 'content-type': 'application/json' },
    });
}
