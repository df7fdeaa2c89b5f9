"""Benchmark CLI entry point."""

from lgmapf.cli import bench

if __name__ == '__main__':
    bench()
