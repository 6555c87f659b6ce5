"""Walk through the network geometry: ENs, UEs, and who serves whom.

A network is built from H edge nodes and a connectivity degree r: one UE
sits on every r-subset of ENs, so K = C(H, r) UEs in total, and every EN
serves L = C(H-1, r-1) of them. Channel matrices carry zeros off this
support, which is what the delivery schemes exploit.
"""

import numpy as np

import cachenet as cn


def main():
    t = cn.build_topology(5, 2)
    print(f"H = {t.h} ENs, connectivity r = {t.r}")
    print(f"K = C({t.h},{t.r}) = {t.k} UEs, each EN serves L = C({t.h-1},{t.r-1}) = {t.l} UEs")
    print()

    print("UE  serving ENs")
    for ue in range(1, t.k + 1):
        print(f"{ue:>2}  {t.ens_of_ue(ue)}")
    print()

    en = 1
    served = [ue for ue in range(1, t.k + 1) if en in t.ens_of_ue(ue)]
    print(f"EN {en} serves UEs {served}")
    for ue in served:
        print(f"  UE {ue} is EN {en}'s rank-{cn.index(t, en, ue)} listener")
    print()

    ch = cn.draw_channel(t, seed=0)
    support = (np.abs(ch.matrix) > 0).astype(int)
    print("channel support (rows = UEs, columns = ENs; 1 = connected):")
    for ue in range(1, t.k + 1):
        print(f"  UE {ue:>2}: {support[ue - 1]}")


if __name__ == "__main__":
    main()
