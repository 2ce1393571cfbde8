import struct

import numpy as np
import pytest

from gridseg.exceptions import ModelFormatError
from gridseg.services.encoding_service import GridTensor
from gridseg.utils.tensor_codec import decode_tensor, encode_tensor, read_tensor, write_tensor


@pytest.fixture
def tensor(rng):
    return GridTensor(rng.random((4, 5, 3)))


class TestTensorCodec:
    def test_header_layout(self, tensor):
        blob = encode_tensor(tensor)
        assert blob[:4] == b'GRDT'
        assert struct.unpack('<III', blob[4:16]) == (4, 5, 3)
        assert len(blob) == 16 + 4 * 5 * 3 * 4

    def test_row_major_little_endian(self):
        t = GridTensor(np.array([[[0.25], [0.5]], [[0.75], [1.0]]]))
        payload = encode_tensor(t)[16:]
        assert struct.unpack('<4f', payload) == (0.25, 0.5, 0.75, 1.0)

    def test_file_round_trip(self, tensor, temp_dir):
        write_tensor(tensor, temp_dir / 'x.grdt')
        assert read_tensor(temp_dir / 'x.grdt').same_as(tensor)

    def test_bad_magic(self, tensor):
        blob = b'XXXX' + encode_tensor(tensor)[4:]
        with pytest.raises(ModelFormatError, match='magic'):
            decode_tensor(blob)

    def test_truncated(self, tensor):
        blob = encode_tensor(tensor)
        with pytest.raises(ModelFormatError):
            decode_tensor(blob[:-4])
        with pytest.raises(ModelFormatError):
            decode_tensor(blob[:10])
