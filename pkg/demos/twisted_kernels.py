"""Derivations, differential operators and connections computed from
scratch over H_F agree with the gamma-images of the untwisted ones."""
from qhgeom import twistfun as tf


def main():
    for make in (tf.abelian_plane_example, tf.octonion_group_example):
        ex = make()
        rep = tf.check_twisted_example(ex)
        print("%s: %d checks, all pass: %s" % (ex.name, len(rep), rep.ok))
        for name, ok, _ in rep.entries:
            if name.startswith(("derivations", "diff", "connections")):
                print("   ", "ok  " if ok else "FAIL", name)


if __name__ == "__main__":
    main()
