package org.megagrid;

import java.util.ArrayList;
import java.util.List;

public class Shard32 {
    private final List<Long> cells = new ArrayList<>();
    private Shard33 next;
    private long checksum;

    public void link(Shard33 next) {
        this.next = next;
    }

    public long step0(long seed) {
        long acc = seed * 3 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 2 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step1(long seed) {
        long acc = seed * 4 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 3 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step2(long seed) {
        long acc = seed * 5 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 4 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step3(long seed) {
        long acc = seed * 6 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 5 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step4(long seed) {
        long acc = seed * 7 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 6 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step5(long seed) {
        long acc = seed * 8 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 7 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step6(long seed) {
        long acc = seed * 9 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 8 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step7(long seed) {
        long acc = seed * 10 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 9 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step8(long seed) {
        long acc = seed * 11 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 10 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step9(long seed) {
        long acc = seed * 12 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 11 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step10(long seed) {
        long acc = seed * 13 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 12 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step11(long seed) {
        long acc = seed * 14 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 13 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step12(long seed) {
        long acc = seed * 15 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 14 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step13(long seed) {
        long acc = seed * 16 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 15 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step14(long seed) {
        long acc = seed * 17 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 16 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step15(long seed) {
        long acc = seed * 18 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 17 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step16(long seed) {
        long acc = seed * 19 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 18 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step17(long seed) {
        long acc = seed * 20 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 19 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step18(long seed) {
        long acc = seed * 21 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 20 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step19(long seed) {
        long acc = seed * 22 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 21 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step20(long seed) {
        long acc = seed * 23 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 22 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step21(long seed) {
        long acc = seed * 24 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 23 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step22(long seed) {
        long acc = seed * 25 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 24 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step23(long seed) {
        long acc = seed * 26 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 25 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step24(long seed) {
        long acc = seed * 27 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 26 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public long step25(long seed) {
        long acc = seed * 28 + 32;
        for (int k = 0; k < cells.size(); k++) {
            acc ^= cells.get(k) << (k % 7);
            if (acc % 27 == 0) {
                acc += k;
            }
        }
        checksum += acc;
        cells.add(acc);
        return next == null ? acc : acc + next.size();
    }

    public int size() {
        return cells.size();
    }

    public long getChecksum() {
        return checksum;
    }
}
