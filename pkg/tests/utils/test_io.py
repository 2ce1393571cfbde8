import time

from gridseg.utils.io import ensure_out_dir, format_value, read_csv, write_csv
from gridseg.utils.parallel import ordered_map


class TestCsv:
    def test_comments_are_skipped_on_read(self, temp_dir):
        path = temp_dir / 'r.csv'
        write_csv(path, ['image', 'mae', 'ok'], [('a.png', 0.25, True), ('b.png', 0.5, False)],
                  comments=['model stub:gt'])
        text = path.read_text()
        assert text.startswith('# model stub:gt\n')
        rows = read_csv(path)
        assert rows == [
            {'image': 'a.png', 'mae': '0.250000', 'ok': '1'},
            {'image': 'b.png', 'mae': '0.500000', 'ok': '0'},
        ]

    def test_format_value(self):
        assert format_value(3) == '3'
        assert format_value(1 / 3) == '0.333333'
        assert format_value('x') == 'x'


def test_ensure_out_dir(temp_dir):
    path = ensure_out_dir(str(temp_dir / 'a' / 'b'))
    assert path.is_dir()
    assert ensure_out_dir(str(path)) == path


class TestOrderedMap:
    def test_keeps_order_with_threads(self):
        def slow_square(v):
            time.sleep(0.01 * (5 - v))
            return v * v
        assert ordered_map(slow_square, range(5), threads=4) == [0, 1, 4, 9, 16]

    def test_single_thread(self):
        assert ordered_map(str, [1, 2], threads=1) == ['1', '2']
