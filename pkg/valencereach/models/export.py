"""自己検査結果の出力用"""
import datetime as dt
import re
from pathlib import Path
from typing import Optional

import pandas as pd

NOT_USED_STRING = r'[\\/:*?"<>|\s]+'
REPLACE_STRING = r'-'


def replace_string(filename: str) -> str:
    """ファイル名で使用できない文字を置き換える

    Parameters
    ----------
    filename: str
        ファイル名
    """

    return re.sub(NOT_USED_STRING, REPLACE_STRING, filename)


class Export:
    """CSV 出力クラス

    Attributes
    ----------
    _filename: Optional[str]
        出力ファイル名の本体. 自己検査の名前
    _root_dir: Optional[Path]
        出力ファイル保存先ディレクトリパス
    """

    def __init__(self, root_dir: Optional[str] = None) -> None:
        self._filename = None
        self._root_dir = None if root_dir is None else Path(root_dir)

    @property
    def filename(self) -> Optional[str]:
        return self._filename

    @filename.setter
    def filename(self, name: str) -> None:
        self._filename = replace_string(name)

    def check_root_dir_exists(self) -> None:
        """ルートディレクトリがなければ作成する"""

        self._root_dir.mkdir(parents=True, exist_ok=True)

    def export_dataframe(self, data: pd.DataFrame, suffix: str = '') -> Optional[Path]:
        """データフレームを日時付きのファイル名で CSV に出力する

        Parameters
        ----------
        data: pd.DataFrame
            出力データ
        suffix: str
            末尾に追加する文字

        Returns
        -------
        Optional[Path]
            出力したファイルのパス. 保存先かファイル名が未設定なら None
        """

        if None in (self._root_dir, self._filename):
            return None

        self.check_root_dir_exists()

        now = dt.datetime.now().strftime(r'%y%m%d%H%M%S_')
        filepath = self._root_dir / (now + self._filename + replace_string(suffix) + '.csv')
        data.to_csv(filepath, index=False)
        return filepath
