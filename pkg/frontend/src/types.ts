// Mirrors of the session service's JSON views.  Every field here is
// produced by the engine; the client adds nothing and recomputes nothing
// beyond viewport transforms.

export type SessionStatus = 'running' | 'terminated' | 'faulted';

export interface VertexView {
    id: number;
    x: number;
    y: number;
    vx: number;
    vy: number;
}

// edge k of a loop joins vertex k to vertex k + 1 (wrapping)
export interface EdgeView {
    alpha: number;
    active: boolean;
    edge_key: number;
}

export interface LoopView {
    vertices: VertexView[];
    edges: EdgeView[];
}

export interface TerminalVertexView {
    id: number;
    x: number;
    y: number;
}

export interface SkeletonNodeView {
    id: number;
    x: number;
    y: number;
    z: number;
    kind: string; // input | collapse | split | turn | colinear
}

export interface SkeletonArcView {
    a: number;
    b: number;
}

export interface SnapshotView {
    z: number;
    loops: number[][][]; // rings of [x, y] pairs
}

export interface EventView {
    kind: string; // collapse | split
    contact: string | null; // edge | vertex for splits
    t: number;
    z: number;
    x: number;
    y: number;
}

export interface SessionView {
    id: string;
    status: SessionStatus;
    z: number;
    t: number;
    input_loops: number[][][];
    loops: LoopView[];
    terminal_loops: TerminalVertexView[][];
    skeleton: {
        nodes: SkeletonNodeView[];
        arcs: SkeletonArcView[];
    };
    snapshots: SnapshotView[];
    events: EventView[];
    journal_length: number;
    fault: string | null;
}

export interface StepView {
    advanced_dz: number;
    events: EventView[];
    status: SessionStatus;
    z: number;
    fault?: string;
}

// document sent to POST /sessions; the service owns validation
export type EdgeAttr = { alpha: number } | { weight: number } | { stationary: true };

export interface PolygonDocument {
    loops: number[][][];
    edges: EdgeAttr[];
    schedule?: { z: number; vz: number }[];
    start_times?: number[];
}

// one edit operation per request, exactly as the edit endpoint expects
export type EditSpec =
    | { set_alpha: { loop: number; edge: number; alpha: number } }
    | { insert_vertex: { loop: number; edge: number; point: [number, number] } }
    | { remove_vertex: { id: number } }
    | { set_schedule: { z: number; vz: number }[] };

export type ExportFormat = 'json' | 'svg' | 'obj';
