/** Monotone request sequence numbers: the view applies a response only if
 * no newer request has been issued since, so a slow early response can
 * never overwrite a fast late one. */

export class RequestSequencer {
  private nextSeq = 0;
  private latestIssued = -1;

  issue(): number {
    this.latestIssued = this.nextSeq;
    return this.nextSeq++;
  }

  /** True iff a response for `seq` is still the most recent request. */
  isCurrent(seq: number): boolean {
    return seq === this.latestIssued;
  }
}
