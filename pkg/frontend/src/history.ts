/** Session history of submissions, newest first, for what-if comparison. */

export interface HistoryEntry {
  mode: string;
  summary: string;
  html: string;
  at: Date;
}

export class SessionHistory {
  private entries: HistoryEntry[] = [];

  constructor(private limit = 20) {}

  add(mode: string, summary: string, html: string): void {
    this.entries.unshift({ mode, summary, html, at: new Date() });
    if (this.entries.length > this.limit) {
      this.entries.pop();
    }
  }

  list(): readonly HistoryEntry[] {
    return this.entries;
  }

  clear(): void {
    this.entries = [];
  }
}
